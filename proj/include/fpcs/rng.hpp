#pragma once

#include <cmath>
#include <cstdint>

namespace fpcs {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so parallel workers can share a seed without
// sharing state and replays are platform-independent.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed) ^ 0x6a09e667f3bcc909ULL ^ mix(stream))) {}

    CounterRng derive(std::uint64_t substream) const {
        CounterRng r(0);
        r.key_ = mix(key_ ^ mix(substream + 0x9e3779b97f4a7c15ULL));
        r.counter_ = 0;
        return r;
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in {0, ..., n-1}.
    int next_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    // +1 or -1 with equal probability.
    double next_sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

    // Standard normal via Box-Muller.
    double next_normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace fpcs
