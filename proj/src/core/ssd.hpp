#pragma once

#include <vector>

#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Pairwise-swap outflow on arc (from, to).
///
/// Strata of the source below the crossing point y keep a density above
/// the target's entry density and stay put; everything above y moves. The
/// closed form is u_to(x_to) (x_from - y) - (p_from(x_from) - p_from(y))
/// with y the clamped inverse of the target's density, floored at zero to
/// guard round-off. Empty sources short-circuit to zero flow.
double ssd_outflow(const PayoffProfile& profile, const Topology& topo,
                   const std::vector<double>& x, int from, int to);

/// All-arcs pairwise-swap flow and the induced state velocity.
void ssd_field(const PayoffProfile& profile, const Topology& topo,
               const std::vector<double>& x, FlowVector& delta_out,
               std::vector<double>& xdot_out);

} // namespace strataflow
