#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace psonn {

// Bad input: unreadable files, malformed CSV/config, dimension mismatches.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A training run that cannot proceed (non-finite fitness, invalid hyperparameters).
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed. Streams with distinct
// ids never collide in practice, so parallel runs can share one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Seeded generator with a platform-independent uniform double mapping.
// std::mt19937_64's output sequence is pinned by the standard; distributions
// are not, so doubles are derived from raw 64-bit draws directly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // uniform integer in [0, n)
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform01() * static_cast<double>(n)); }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.index(i);
        std::swap(v[i - 1], v[j]);
    }
}

// Runs body(i) for i in [0, n). With threads <= 1 this is a plain loop.
// body(i) must touch only state owned by index i; results are then identical
// for any schedule.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        }));
    }
    for (auto& f : futures) f.get();
}

}  // namespace psonn
