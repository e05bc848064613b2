#pragma once

#include <cstdint>
#include <random>

namespace facloc {

/// Deterministic random source used everywhere randomness is needed.
///
/// std::mt19937_64 is bit-exact across implementations; the variate
/// transforms are hand-rolled here because the standard library
/// distributions are not, and fixed seeds must reproduce byte-identical
/// artifacts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double gaussian();

    double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace facloc
