#pragma once

#include <cmath>
#include <cstdint>

namespace glauber::rng {

// SplitMix64 finalizer. Used as the single mixing primitive of the project:
// every random stream is a pure function of (key, counter), so sampling order
// never affects results.
inline std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Derive an independent sub-stream key, e.g. per bond or per realization.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix(seed ^ mix(index + 0x632be59bd9b4e019ull));
}

// Map the 53 high bits onto [0,1).
inline double to_unit(std::uint64_t u) noexcept {
    return static_cast<double>(u >> 11) * 0x1.0p-53;
}

// Counter-based stream: next() = mix(key + counter). Cheap to fork and to
// replay from any point.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    std::uint64_t next_u64() noexcept { return mix(key_ + ++counter_); }

    double next_unit() noexcept { return to_unit(next_u64()); }

    // Uniform on [lo, hi]; endpoints attainable only when lo == hi.
    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * next_unit();
    }

    double next_exponential(double rate) noexcept {
        return -std::log1p(-next_unit()) / rate;
    }

    // Standard normal via Box-Muller (one value per call, no caching so the
    // stream position stays a pure function of the draw count).
    double next_normal() noexcept {
        double u1 = next_unit();
        while (u1 <= 0.0) u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    std::uint64_t counter() const noexcept { return counter_; }
    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace glauber::rng
