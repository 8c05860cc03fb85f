#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace strataflow {

std::vector<double> random_simplex(SplitMix64& rng, int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& xi : x) {
        // -log(U) gives exponential spacings; normalizing yields a
        // uniform draw from the simplex interior.
        double u = rng.uniform();
        if (u < 1e-300) u = 1e-300;
        xi = -std::log(u);
        total += xi;
    }
    for (double& xi : x) xi /= total;
    return x;
}

Topology random_connected_topology(SplitMix64& rng, int n) {
    std::set<std::pair<int, int>> chosen;

    // Random spanning tree: attach each new node to a uniformly chosen
    // earlier one.
    for (int v = 1; v < n; ++v) {
        int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
        chosen.emplace(std::min(u, v), std::max(u, v));
    }

    // Sprinkle extra edges with probability 1/3 per remaining pair.
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (chosen.count({u, v})) continue;
            if (rng.uniform() < 1.0 / 3.0) chosen.emplace(u, v);
        }
    }

    std::vector<std::pair<int, int>> edges(chosen.begin(), chosen.end());
    return Topology::build(n, edges);
}

PayoffProfile random_profile(SplitMix64& rng, int n) {
    std::vector<PayoffFunction> nodes;
    nodes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (rng.uniform() < 0.5) {
            double a = rng.uniform(0.0, 3.0);
            double c = rng.uniform(0.5, 2.0);
            nodes.push_back(PayoffFunction::quadratic(a, c));
        } else {
            double w = rng.uniform(0.5, 2.0);
            double s = rng.uniform(0.3, 1.5);
            nodes.push_back(PayoffFunction::logarithmic(w, s));
        }
    }
    return PayoffProfile(std::move(nodes));
}

} // namespace strataflow
