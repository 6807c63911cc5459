#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace cddp {

// Counter-style generator with named substreams. A substream is keyed by
// (seed, label) where the label encodes the logical coordinates of the draw
// site, e.g. "gen/group=2/scenario=7/cell=13". Draws inside a substream come
// from a splitmix64 chain seeded by the key hash, so adding new substreams
// (new groups, new members) never shifts the draws of existing ones.
class Rng {
public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    Rng(std::uint64_t seed, std::string_view label) : state_(mix_label(seed, label)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection sampling keeps the draw exactly uniform.
        std::uint64_t limit = n * ((~0ULL) / n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    // Standard normal via Box-Muller (both draws consumed, first returned).
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t mix_label(std::uint64_t seed, std::string_view label) {
        // FNV-1a over the label, folded into the seed through splitmix.
        std::uint64_t h = 1469598103934665603ULL ^ seed;
        for (unsigned char c : label) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        // One splitmix scramble so nearby labels land far apart.
        h += 0x9e3779b97f4a7c15ULL;
        h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
        h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
        return h ^ (h >> 31);
    }

    std::uint64_t state_;
};

}  // namespace cddp
