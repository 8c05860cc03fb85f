#pragma once

#include <vector>

#include "field.hpp"
#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Support threshold: components at or below this count as unoccupied.
inline constexpr double kSupportThreshold = 1e-9;

/// Verdict of the neighbor-domination check at a state.
struct NashReport {
    bool is_nash = false;
    double worst_violation = 0.0; // largest neighbor density excess, floored at 0
    std::vector<int> support;     // occupied nodes, sorted
};

/// A state is accepted when every occupied node's density weakly dominates
/// all of its neighbors' densities, up to `tol`.
NashReport is_nash(const PayoffProfile& profile, const Topology& topo,
                   const std::vector<double>& x, double tol);

/// Flow/payoff consistency: arcs from weakly-richer to weakly-poorer nodes
/// must carry no flow (beyond `tol`).
struct SpcReport {
    bool satisfied = true;
    std::vector<Arc> violations;
};

SpcReport check_spc(const PayoffProfile& profile, const Topology& topo,
                    const std::vector<double>& x, const FlowVector& delta, double tol);

/// Sup norm of the selected dynamics' velocity at x.
double equilibrium_residual(const PayoffProfile& profile, const Topology& topo,
                            const std::vector<double>& x, Dynamics kind);

/// Graph-independent social-utility maximizer over the whole simplex.
struct Waterfill {
    std::vector<double> x;
    double level = 0.0; // common density on the support
};

/// Waterfills the unit mass over all nodes: occupied nodes share one
/// density level, unoccupied nodes enter below it.
Waterfill global_waterfill(const PayoffProfile& profile);

} // namespace strataflow
