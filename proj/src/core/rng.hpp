#pragma once

#include <cstdint>
#include <vector>

#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Counter-based 64-bit generator. Any (seed, stream) pair is addressable
/// directly, so validation cases replay independently of each other.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

private:
    std::uint64_t state_;
};

/// Generator for validation case `index` under `seed`.
inline SplitMix64 case_rng(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0x6a09e667f3bcc909ull + index * 0x9e3779b97f4a7c15ull));
    mixer.next(); // decorrelate adjacent indices
    return mixer;
}

/// Uniform point on the simplex (exponential spacings, normalized).
std::vector<double> random_simplex(SplitMix64& rng, int n);

/// Random connected graph: a random spanning tree plus a random sprinkle
/// of extra edges.
Topology random_connected_topology(SplitMix64& rng, int n);

/// Mixed quadratic/log profile with moderately conditioned parameters.
PayoffProfile random_profile(SplitMix64& rng, int n);

} // namespace strataflow
