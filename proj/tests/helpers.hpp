#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "psonn/dataset.hpp"
#include "psonn/util.hpp"

namespace testutil {

// Two well-separated Gaussian blobs in 2-D: class 0 around (-2,-2), class 1
// around (2,2), sigma 0.5. Separable by construction.
inline psonn::Dataset make_blobs(std::size_t n, std::uint64_t seed) {
    psonn::Rng rng(seed);
    auto gaussian = [&rng] {
        // Box-Muller; u1 nudged away from 0
        const double u1 = rng.uniform01() + 1e-12;
        const double u2 = rng.uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    };
    psonn::Dataset data;
    data.feature_names = {"x", "y"};
    data.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        const double cx = label == 1 ? 2.0 : -2.0;
        const double cy = label == 1 ? 2.0 : -2.0;
        data.records.push_back({{cx + 0.5 * gaussian(), cy + 0.5 * gaussian()}, label});
    }
    return data;
}

inline psonn::Dataset make_xor() {
    psonn::Dataset data;
    data.feature_names = {"a", "b"};
    data.records = {{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}};
    return data;
}

// Continuous random features with random labels; duplicate feature rows are
// almost surely absent, so labels can never contradict.
inline psonn::Dataset make_random_dataset(std::size_t n, std::size_t features, std::uint64_t seed) {
    psonn::Rng rng(seed);
    psonn::Dataset data;
    for (std::size_t f = 0; f < features; ++f) data.feature_names.push_back("f" + std::to_string(f));
    data.records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        psonn::Record rec;
        rec.features.resize(features);
        for (auto& v : rec.features) v = rng.uniform(-1.0, 1.0);
        rec.label = rng.uniform01() < 0.5 ? 0 : 1;
        data.records.push_back(std::move(rec));
    }
    return data;
}

inline std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "psonn_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string write_temp_file(const std::string& name, const std::string& content) {
    const auto path = temp_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// A CSV in the 9-column heart layout. Labels follow a clean rule (positive iff
// troponin > 0.05 or CK-MB > 10), so every model can learn it; gender and
// target are textual to exercise the encoding paths.
inline std::string synthetic_heart_csv(std::size_t rows, std::uint64_t seed) {
    psonn::Rng rng(seed);
    std::ostringstream out;
    out << "Age,Gender,Pulse,Pressure high,Pressure low,Glucose,CK-MB,Troponin,Target\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const bool positive = i % 2 == 1;
        const double age = 25.0 + rng.index(60);
        const std::string gender = rng.uniform01() < 0.5 ? "male" : "female";
        const double pulse = 55.0 + rng.index(60);
        const double high = 95.0 + rng.index(80);
        const double low = 50.0 + rng.index(45);
        const double glucose = 80.0 + rng.index(220);
        const double ckmb = positive ? 12.0 + rng.uniform(0.0, 40.0) : rng.uniform(0.3, 5.0);
        const double troponin = positive ? rng.uniform(0.06, 2.0) : rng.uniform(0.001, 0.012);
        out << age << ',' << gender << ',' << pulse << ',' << high << ',' << low << ','
            << glucose << ',' << ckmb << ',' << troponin << ','
            << (positive ? "positive" : "negative") << "\n";
    }
    return out.str();
}

}  // namespace testutil
