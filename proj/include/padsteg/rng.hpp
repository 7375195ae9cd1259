#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace padsteg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded source with platform-independent derived draws (the std
/// distributions are implementation-defined, the engine is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    std::uint8_t next_byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

    std::uint8_t next_nonzero_byte() {
        for (;;)
            if (auto b = next_byte(); b != 0) return b;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;)
            if (auto x = engine_(); x < limit) return x % n;
    }

    /// Exponential with the given rate (events per unit).
    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Index drawn from a discrete distribution given by weights summing to ~1.
    std::size_t pick(std::span<const double> weights) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        // Rounding slack: last class with nonzero weight.
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0) return i;
        return 0;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace padsteg
