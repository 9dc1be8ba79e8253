#pragma once
// Deterministic random streams. Everything in the simulator draws from
// SplitMix64, either as a sequential stream or as a stateless hash of a
// structured key. Raw 64-bit outputs are converted to doubles in-house so
// results are identical across platforms and standard libraries.

#include <cstdint>

namespace scout {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Combine values into one 64-bit key, order-sensitive.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

template <typename... Rest>
constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t v, Rest... rest) {
    std::uint64_t h = hash_combine(seed, v);
    if constexpr (sizeof...(rest) == 0) {
        return h;
    } else {
        return hash_key(h, static_cast<std::uint64_t>(rest)...);
    }
}

// 53-bit mantissa conversion, uniform in [0, 1).
constexpr double to_unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Sequential stream with a SplitMix64 state walk.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return to_unit_double(next_u64()); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n). n must be > 0. Rejection-free modulo is fine
    // here: n is always tiny relative to 2^64 and bias is immaterial, but the
    // draw must be reproducible, which this is.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Uniform integer in [lo, hi] inclusive.
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool chance(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

// Stateless draws keyed by content rather than call order. Used by the
// oracles so that two episodes querying the same frontier get the same
// noise realization regardless of when the query happens.
inline double keyed_unit(std::uint64_t key) { return to_unit_double(splitmix64(key)); }

} // namespace scout
