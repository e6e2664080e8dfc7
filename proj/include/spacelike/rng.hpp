#pragma once

// Counter-based generator: the n-th draw is a pure function of (key, n), so a
// trial's stream depends only on the root seed and the trial index.

#include <cstdint>

namespace spacelike {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}

    // Independent child stream; the parent is not advanced.
    constexpr CounterRng split(std::uint64_t stream) const {
        return CounterRng(key_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    }

    constexpr std::uint64_t next() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    // Uniform in [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in the open interval (0, 1).
    constexpr double uniform_open() {
        double u = 0.0;
        while (u == 0.0) u = uniform();
        return u;
    }

    constexpr std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Seed of trial `index` under `root`.
constexpr std::uint64_t trial_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(splitmix64(root) + splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

}  // namespace spacelike
