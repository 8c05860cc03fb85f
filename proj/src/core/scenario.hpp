#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graph.hpp"
#include "integrator.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Fully validated run description, as read from a scenario file.
struct Scenario {
    Topology topology;
    PayoffProfile profile;
    SimulationConfig config;
    std::vector<double> x0;
    std::string trajectory_csv = "trajectory.csv";
    std::string summary_json = "summary.json";
    std::uint64_t seed = 0;
};

/// Parses and validates scenario JSON text. Error messages name the
/// offending field path. Throws ConfigError.
Scenario parse_scenario(const std::string& json_text);

/// Reads the file and delegates to parse_scenario.
Scenario load_scenario_file(const std::string& path);

/// Serializes a scenario back to JSON (used to hand failing validation
/// instances to the user for replay).
std::string scenario_to_json(const Scenario& scenario);

} // namespace strataflow
