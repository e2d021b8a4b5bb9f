#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "psonn/util.hpp"

namespace psonn {

// Untyped CSV contents: a header row plus string cells, exactly as read.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// One encoded row: feature values in column order plus the binary label
// (1 = positive, 0 = negative).
struct Record {
    std::vector<double> features;
    int label = 0;
};

struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<Record> records;

    std::size_t n_features() const { return feature_names.size(); }
    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
};

// Named view of one encoded heart-dataset row.
struct PatientRecord {
    double age = 0;
    double gender = 0;        // male 1, female 0
    double heart_rate = 0;
    double systolic_bp = 0;
    double diastolic_bp = 0;
    double glucose_flag = 0;  // 1 if blood sugar > 120 mg/dl
    double ck_mb = 0;
    double troponin = 0;
    int label = 0;
};

inline const std::vector<std::string>& heart_feature_names() {
    static const std::vector<std::string> names = {
        "age", "gender", "heart_rate", "systolic_bp",
        "diastolic_bp", "glucose", "ck_mb", "troponin"};
    return names;
}

constexpr std::size_t kHeartFeatureCount = 8;

inline PatientRecord as_patient(const Record& r) {
    if (r.features.size() != kHeartFeatureCount)
        throw DataError("record has " + std::to_string(r.features.size()) +
                        " features, expected " + std::to_string(kHeartFeatureCount));
    PatientRecord p;
    p.age = r.features[0];
    p.gender = r.features[1];
    p.heart_rate = r.features[2];
    p.systolic_bp = r.features[3];
    p.diastolic_bp = r.features[4];
    p.glucose_flag = r.features[5];
    p.ck_mb = r.features[6];
    p.troponin = r.features[7];
    p.label = r.label;
    return p;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

inline double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    const std::string t = trim(cell);
    if (!t.empty()) {
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (end == t.c_str() + t.size() && std::isfinite(v)) return v;
    }
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': non-numeric value '" + cell + "'");
}

}  // namespace detail

// Reads a comma-separated file with one header row. No type coercion; row
// order is preserved. Ragged rows are rejected with their line number.
inline RawTable load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    RawTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_fields(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
            throw DataError("'" + path + "' line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw DataError("'" + path + "': no header row");
    return table;
}

// Encodes the 9-column heart layout (age, gender, pulse, systolic, diastolic,
// glucose, CK-MB, troponin, target). Gender and target may be textual or
// already 0/1. The glucose column is flagged with the >120 mg/dl rule when it
// holds raw values; a column that is already all 0/1 is kept as is, which also
// makes encoding idempotent. Values outside the descriptive attribute ranges
// are kept and reported through `warnings`.
inline Dataset encode(const RawTable& raw, std::vector<std::string>* warnings = nullptr) {
    constexpr std::size_t kColumns = kHeartFeatureCount + 1;
    if (raw.header.size() != kColumns)
        throw DataError("expected the " + std::to_string(kColumns) +
                        "-column heart layout, found " + std::to_string(raw.header.size()) +
                        " columns");

    enum Col { kAge = 0, kGender, kPulse, kSystolic, kDiastolic, kGlucose, kCkMb, kTroponin, kTarget };

    // Glucose ships either raw (mg/dl) or pre-encoded; raw mode iff any value
    // falls outside {0,1}.
    bool glucose_encoded = true;
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        double v = detail::parse_number(raw.rows[i][kGlucose], i + 2, raw.header[kGlucose]);
        if (v != 0.0 && v != 1.0) {
            glucose_encoded = false;
            break;
        }
    }

    Dataset data;
    data.feature_names = heart_feature_names();
    data.records.reserve(raw.rows.size());

    std::size_t heart_rate_oob = 0, systolic_oob = 0, diastolic_oob = 0, glucose_oob = 0, enzyme_neg = 0;

    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        const auto& cells = raw.rows[i];
        const std::size_t line_no = i + 2;  // header is line 1
        Record rec;
        rec.features.resize(kHeartFeatureCount);

        rec.features[0] = detail::parse_number(cells[kAge], line_no, raw.header[kAge]);

        const std::string gender = detail::lowercase(detail::trim(cells[kGender]));
        if (gender == "male") {
            rec.features[1] = 1.0;
        } else if (gender == "female") {
            rec.features[1] = 0.0;
        } else {
            double g;
            try {
                g = detail::parse_number(cells[kGender], line_no, raw.header[kGender]);
            } catch (const DataError&) {
                throw DataError("line " + std::to_string(line_no) + ": unrecognized gender '" +
                                cells[kGender] + "' (expected male, female, 0 or 1)");
            }
            if (g != 0.0 && g != 1.0)
                throw DataError("line " + std::to_string(line_no) + ": unrecognized gender '" +
                                cells[kGender] + "' (expected male, female, 0 or 1)");
            rec.features[1] = g;
        }

        rec.features[2] = detail::parse_number(cells[kPulse], line_no, raw.header[kPulse]);
        rec.features[3] = detail::parse_number(cells[kSystolic], line_no, raw.header[kSystolic]);
        rec.features[4] = detail::parse_number(cells[kDiastolic], line_no, raw.header[kDiastolic]);

        double glucose = detail::parse_number(cells[kGlucose], line_no, raw.header[kGlucose]);
        if (glucose_encoded) {
            rec.features[5] = glucose;
        } else {
            if (glucose < 1.0 || glucose > 900.0) ++glucose_oob;
            rec.features[5] = glucose > 120.0 ? 1.0 : 0.0;
        }

        rec.features[6] = detail::parse_number(cells[kCkMb], line_no, raw.header[kCkMb]);
        rec.features[7] = detail::parse_number(cells[kTroponin], line_no, raw.header[kTroponin]);

        const std::string target = detail::lowercase(detail::trim(cells[kTarget]));
        if (target == "positive") {
            rec.label = 1;
        } else if (target == "negative") {
            rec.label = 0;
        } else {
            double t;
            try {
                t = detail::parse_number(cells[kTarget], line_no, raw.header[kTarget]);
            } catch (const DataError&) {
                throw DataError("line " + std::to_string(line_no) + ": unrecognized target '" +
                                cells[kTarget] + "' (expected positive, negative, 0 or 1)");
            }
            if (t != 0.0 && t != 1.0)
                throw DataError("line " + std::to_string(line_no) + ": unrecognized target '" +
                                cells[kTarget] + "' (expected positive, negative, 0 or 1)");
            rec.label = static_cast<int>(t);
        }

        if (rec.features[2] < 10.0 || rec.features[2] > 180.0) ++heart_rate_oob;
        if (rec.features[3] < 70.0 || rec.features[3] > 190.0) ++systolic_oob;
        if (rec.features[4] < 40.0 || rec.features[4] > 100.0) ++diastolic_oob;
        if (rec.features[6] < 0.0 || rec.features[7] < 0.0) ++enzyme_neg;

        data.records.push_back(std::move(rec));
    }

    if (warnings) {
        auto note = [&](std::size_t n, const std::string& what) {
            if (n > 0) warnings->push_back(std::to_string(n) + " value(s) outside the " + what);
        };
        note(heart_rate_oob, "descriptive heart-rate range [10, 180]");
        note(systolic_oob, "descriptive systolic range [70, 190]");
        note(diastolic_oob, "descriptive diastolic range [40, 100]");
        note(glucose_oob, "descriptive blood-sugar range [1, 900]");
        note(enzyme_neg, "non-negative enzyme range");
    }
    return data;
}

// Per-feature (min, max) pairs fitted on one dataset.
struct NormalizationParams {
    std::vector<std::pair<double, double>> ranges;
};

inline NormalizationParams fit_normalizer(const Dataset& train) {
    if (train.empty()) throw DataError("cannot fit a normalizer on an empty dataset");
    NormalizationParams params;
    params.ranges.assign(train.n_features(),
                         {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (const auto& rec : train.records) {
        for (std::size_t f = 0; f < params.ranges.size(); ++f) {
            params.ranges[f].first = std::min(params.ranges[f].first, rec.features[f]);
            params.ranges[f].second = std::max(params.ranges[f].second, rec.features[f]);
        }
    }
    return params;
}

// Maps each feature to (x - min) / (max - min), clamped to [0, 1]. A constant
// feature (max == min) maps to 0 so downstream math stays finite.
inline Dataset apply_normalizer(const Dataset& data, const NormalizationParams& params) {
    if (params.ranges.size() != data.n_features())
        throw DataError("normalizer has " + std::to_string(params.ranges.size()) +
                        " feature ranges, dataset has " + std::to_string(data.n_features()));
    Dataset out = data;
    for (auto& rec : out.records) {
        for (std::size_t f = 0; f < params.ranges.size(); ++f) {
            const auto [lo, hi] = params.ranges[f];
            double v = hi > lo ? (rec.features[f] - lo) / (hi - lo) : 0.0;
            rec.features[f] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    bool shuffle = true;
    bool stratified = false;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Partitions record indices. Train size is floor(N * fraction) for the plain
// split; the stratified variant takes floor(n_c * fraction) from each class.
inline SplitIndices split_indices(const Dataset& data, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw DataError("train_fraction must be in (0, 1), got " + std::to_string(spec.train_fraction));
    if (data.size() < 2) throw DataError("need at least 2 records to split");

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (spec.shuffle) {
        Rng rng(spec.seed);
        fisher_yates_shuffle(order, rng);
    }

    SplitIndices out;
    if (!spec.stratified) {
        const auto train_size = static_cast<std::size_t>(
            std::floor(static_cast<double>(data.size()) * spec.train_fraction));
        out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
        out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());
        return out;
    }

    std::size_t class_total[2] = {0, 0};
    for (const auto& rec : data.records) ++class_total[rec.label == 1 ? 1 : 0];
    std::size_t quota[2];
    for (int c = 0; c < 2; ++c)
        quota[c] = static_cast<std::size_t>(std::floor(static_cast<double>(class_total[c]) * spec.train_fraction));
    std::size_t taken[2] = {0, 0};
    for (std::size_t i : order) {
        const int c = data.records[i].label == 1 ? 1 : 0;
        if (taken[c] < quota[c]) {
            out.train.push_back(i);
            ++taken[c];
        } else {
            out.test.push_back(i);
        }
    }
    return out;
}

inline Dataset take(const Dataset& data, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.records.reserve(indices.size());
    for (std::size_t i : indices) out.records.push_back(data.records[i]);
    return out;
}

inline std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
    const SplitIndices idx = split_indices(data, spec);
    return {take(data, idx.train), take(data, idx.test)};
}

// (positives, negatives)
inline std::pair<std::size_t, std::size_t> class_counts(const Dataset& data) {
    std::size_t pos = 0;
    for (const auto& rec : data.records)
        if (rec.label == 1) ++pos;
    return {pos, data.size() - pos};
}

}  // namespace psonn
