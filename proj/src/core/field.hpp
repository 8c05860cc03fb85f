#pragma once

#include <string>
#include <vector>

#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Which revision protocol drives the population.
enum class Dynamics { Ssd, Nbrd, Nrpm };

std::string dynamics_name(Dynamics kind);
Dynamics dynamics_from_name(const std::string& name); // throws ConfigError

/// One field evaluation: arc outflows plus the induced state velocity.
struct FieldEval {
    FlowVector delta;
    std::vector<double> xdot;
};

/// Evaluates the selected dynamics at x. For the reallocation dynamics a
/// non-null `warm_d` (length N*N) chains plan solves across calls.
FieldEval eval_field(const PayoffProfile& profile, const Topology& topo, Dynamics kind,
                     const std::vector<double>& x, std::vector<double>* warm_d = nullptr);

} // namespace strataflow
