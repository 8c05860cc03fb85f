#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Outcome of the randomized property suite.
struct ValidationResult {
    bool passed = false;
    long checks_passed = 0;
    long checks_failed = 0;
    std::string report; // pass/fail table plus first-failure details
};

/// Runs every documented model property on `cases` seeded random
/// instances (connected graphs with 3-6 nodes, mixed payoff families,
/// random states) plus a block of fixed reference instances.
/// Deterministic for a given seed; failing checks carry the (seed, case)
/// pair and a replayable scenario serialization in the report.
ValidationResult run_validation(std::uint64_t seed, int cases);

/// Adaptive-quadrature reference for the pairwise-swap outflow on one
/// arc: integrates the positive part of the density gap over the source
/// strata directly, independent of the closed form.
double ssd_outflow_quadrature(const PayoffProfile& profile, const Topology& topo,
                              const std::vector<double>& x, int from, int to);

} // namespace strataflow
