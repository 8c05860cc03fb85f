#pragma once

#include <vector>

#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// One-hop reallocation plan and its outcome. The plan d is stored as an
/// N x N row-major matrix: d[i*N + j] is the mass node i routes to j
/// (self entries allowed, nonzero only on closed-neighborhood pairs). The
/// post-reallocation state z is the unique part of the optimum; d itself
/// may be any optimizer.
struct Reallocation {
    std::vector<double> z;   // length N
    std::vector<double> d;   // length N*N, row-major
    double objective = 0.0;  // social utility of z
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// Maximizes social utility over one-hop reallocations of x by projected
/// gradient ascent on the plan rows (each a scaled simplex) with step
/// 1/L, L = (max degree + 1) * max density slope. Stops when the scaled
/// update norm drops to 1e-9 or after 1e5 iterations; the iteration cap
/// with a residual still above 1e-6 raises ConvergenceError.
/// `warm_d` (length N*N) seeds the iteration; rows are re-projected onto
/// the current row masses first.
Reallocation solve_p3(const PayoffProfile& profile, const Topology& topo,
                      const std::vector<double>& x,
                      const std::vector<double>* warm_d = nullptr);

/// The unique post-reallocation state; convenience wrapper over solve_p3.
std::vector<double> z_star(const PayoffProfile& profile, const Topology& topo,
                           const std::vector<double>& x);

/// Field of the reallocation dynamics: xdot = z*(x) - x; delta reports one
/// optimizer's arc flows (self entries dropped). `warm_d` is read and
/// refreshed when given, chaining solves along a trajectory.
void nrpm_field(const PayoffProfile& profile, const Topology& topo,
                const std::vector<double>& x, FlowVector& delta_out,
                std::vector<double>& xdot_out, std::vector<double>* warm_d = nullptr);

/// Closed-form post-reallocation state for a fixed support pattern: on
/// each origin/destination block the origin mass is waterfilled over the
/// destinations; nodes no pattern arc points at get zero.
std::vector<double> support_value(const PayoffProfile& profile, const Topology& topo,
                                  const std::vector<double>& x,
                                  const std::vector<Arc>& pattern);

/// Consistency check of a solved plan: (a) every occupied node routes
/// somewhere, (b) occupied nodes appear among the origins, (c) the
/// pattern's closed-form state matches z within 1e-6.
bool verify_support_pattern(const PayoffProfile& profile, const Topology& topo,
                            const std::vector<double>& x, const Reallocation& plan);

/// Stationarity certificate for a feasible plan: per origin the best
/// reachable density bounds every destination's density, with
/// complementary slackness on used entries. Optimal plans score <= 1e-8.
double verify_kkt_p3(const PayoffProfile& profile, const Topology& topo,
                     const std::vector<double>& x, const Reallocation& plan);

/// Desk-scale oracle: exhaustive search over per-node grid compositions
/// of the plan. Requires every occupied node's mass to sit on the grid,
/// total plan dimension at most 8, and grid_step >= 0.025.
Reallocation brute_force_p3(const PayoffProfile& profile, const Topology& topo,
                            const std::vector<double>& x, double grid_step);

} // namespace strataflow
