#pragma once

// Shared builders for the test suite: the small fixed graphs and quadratic
// profiles most cases are phrased in.

#include <utility>
#include <vector>

#include "core/graph.hpp"
#include "core/payoff.hpp"

namespace testutil {

inline strataflow::Topology path(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return strataflow::Topology::build(n, edges);
}

inline strataflow::Topology cycle(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return strataflow::Topology::build(n, edges);
}

inline strataflow::Topology complete(int n) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    }
    return strataflow::Topology::build(n, edges);
}

/// Quadratic profile u_i(y) = -curvature * y - offsets[i].
inline strataflow::PayoffProfile quadratic_profile(const std::vector<double>& offsets,
                                                   double curvature = 1.0) {
    std::vector<strataflow::PayoffFunction> fns;
    fns.reserve(offsets.size());
    for (double a : offsets) {
        fns.push_back(strataflow::PayoffFunction::quadratic(a, curvature));
    }
    return strataflow::PayoffProfile(std::move(fns));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double gap = a[i] > b[i] ? a[i] - b[i] : b[i] - a[i];
        if (gap > worst) worst = gap;
    }
    return worst;
}

} // namespace testutil
