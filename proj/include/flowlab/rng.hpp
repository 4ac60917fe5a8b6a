#pragma once

#include <cstdint>
#include <random>

namespace flowlab {

// splitmix64 of (seed, index): cheap way to derive independent streams so
// sample i is the same no matter how many samples are drawn or which thread
// draws it.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

    double normal(double stddev = 1.0) {
        std::normal_distribution<double> dist(0.0, stddev);
        return dist(engine_);
    }

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> dist(lo, hi);
        return dist(engine_);
    }

    std::uint64_t next() { return engine_(); }

   private:
    std::mt19937_64 engine_;
};

}  // namespace flowlab
