#pragma once

#include <vector>

#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Optimal one-shot reallocation of one node's mass over its closed
/// neighborhood: d[j] is the mass sent to j (zero off the neighborhood),
/// eta the shared post-move density level, support the receiving set.
/// eta is defined only when the node holds mass.
struct BestResponse {
    int node = 0;
    std::vector<double> d;    // length N
    double eta = 0.0;
    bool eta_defined = false;
    std::vector<int> support; // sorted receiving nodes
};

/// Greedy waterfilling solve of the node's reallocation program.
///
/// Candidates are the node itself (entry level u_i(0)) and its neighbors
/// (entry levels u_j(x_j)), sorted by entry descending with index
/// ascending on ties. The receiving prefix grows while the next entry
/// strictly exceeds the current common level; exact ties are excluded
/// (their allocation would be zero anyway), keeping the support minimal.
BestResponse solve_node_best_response(const PayoffProfile& profile, const Topology& topo,
                                      const std::vector<double>& x, int i);

/// Stationarity certificate for a feasible best response: rebuilds the
/// multipliers from the level and returns the largest violation among
/// stationarity on the support, sign constraints, and complementary
/// slackness. Optimal responses score <= 1e-8. Throws ConfigError when the
/// allocation is infeasible (negative entry or mass mismatch).
double verify_kkt_p2(const PayoffProfile& profile, const Topology& topo,
                     const std::vector<double>& x, int i, const BestResponse& br);

/// Exhaustive test oracle: tries every nonempty receiving set in the
/// closed neighborhood, keeps the ones whose level allocation is
/// primal-feasible, and returns the objective maximizer. Scales to
/// closed neighborhoods of at most 20 nodes.
BestResponse enumerate_supports_p2(const PayoffProfile& profile, const Topology& topo,
                                   const std::vector<double>& x, int i);

/// Uniqueness probe: projected gradient ascent on the node's scaled
/// simplex from an arbitrary feasible start. Converges to the same
/// allocation as the waterfilling for any start (strict concavity).
BestResponse p2_projected_gradient(const PayoffProfile& profile, const Topology& topo,
                                   const std::vector<double>& x, int i,
                                   const std::vector<double>& d0);

/// Field assembly: every node's best response contributes its neighbor
/// allocations as arc outflows (self-allocations are not arc flows).
void nbrd_field(const PayoffProfile& profile, const Topology& topo,
                const std::vector<double>& x, FlowVector& delta_out,
                std::vector<double>& xdot_out);

/// Euclidean projection onto the scaled simplex {w >= 0, sum w = radius}.
std::vector<double> project_simplex(std::vector<double> v, double radius);

} // namespace strataflow
