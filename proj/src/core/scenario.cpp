#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace strataflow {

namespace {

using nlohmann::json;

const json& require_field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError("scenario: missing field \"" + path + "\"");
    }
    return *it;
}

double number_at(const json& value, const std::string& path) {
    if (!value.is_number()) {
        throw ConfigError("scenario: field \"" + path + "\" must be a number");
    }
    return value.get<double>();
}

PayoffFunction parse_payoff(const json& spec, const std::string& path) {
    if (!spec.is_object()) {
        throw ConfigError("scenario: field \"" + path + "\" must be an object");
    }
    const std::string type = require_field(spec, "type", path + ".type").get<std::string>();
    if (type == "quadratic") {
        const double a = number_at(require_field(spec, "a", path + ".a"), path + ".a");
        const double c = spec.contains("c") ? number_at(spec["c"], path + ".c") : 1.0;
        return PayoffFunction::quadratic(a, c);
    }
    if (type == "log") {
        const double w = number_at(require_field(spec, "w", path + ".w"), path + ".w");
        const double s = number_at(require_field(spec, "s", path + ".s"), path + ".s");
        return PayoffFunction::logarithmic(w, s);
    }
    if (type == "custom") {
        const json& grid = require_field(spec, "density", path + ".density");
        if (!grid.is_array()) {
            throw ConfigError("scenario: field \"" + path + ".density\" must be an array");
        }
        std::vector<double> samples;
        samples.reserve(grid.size());
        for (size_t k = 0; k < grid.size(); ++k) {
            samples.push_back(number_at(grid[k], path + ".density[" + std::to_string(k) + "]"));
        }
        return PayoffFunction::custom(std::move(samples));
    }
    throw ConfigError("scenario: field \"" + path + ".type\" has unknown payoff type \"" +
                      type + "\"");
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("scenario: top level must be an object");

    // graph
    const json& graph = require_field(doc, "graph", "graph");
    const json& nodes_field = require_field(graph, "nodes", "graph.nodes");
    if (!nodes_field.is_number_integer()) {
        throw ConfigError("scenario: field \"graph.nodes\" must be an integer");
    }
    const int n = nodes_field.get<int>();
    const json& edges_field = require_field(graph, "edges", "graph.edges");
    if (!edges_field.is_array()) {
        throw ConfigError("scenario: field \"graph.edges\" must be an array");
    }
    std::vector<std::pair<int, int>> edges;
    for (size_t k = 0; k < edges_field.size(); ++k) {
        const json& e = edges_field[k];
        const std::string path = "graph.edges[" + std::to_string(k) + "]";
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer()) {
            throw ConfigError("scenario: field \"" + path + "\" must be a pair of node labels");
        }
        edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1); // files are 1-based
    }
    Topology topology = Topology::build(n, edges);

    // payoffs
    const json& payoffs = require_field(doc, "payoffs", "payoffs");
    if (!payoffs.is_array() || static_cast<int>(payoffs.size()) != n) {
        throw ConfigError("scenario: field \"payoffs\" must list exactly " + std::to_string(n) +
                          " per-node payoff objects");
    }
    std::vector<PayoffFunction> functions;
    functions.reserve(payoffs.size());
    for (size_t k = 0; k < payoffs.size(); ++k) {
        functions.push_back(parse_payoff(payoffs[k], "payoffs[" + std::to_string(k) + "]"));
    }
    PayoffProfile profile(std::move(functions));

    // dynamics + integrator settings
    SimulationConfig config;
    config.dynamics =
        dynamics_from_name(require_field(doc, "dynamics", "dynamics").get<std::string>());
    if (doc.contains("integrator")) {
        const json& integ = doc["integrator"];
        if (!integ.is_object()) {
            throw ConfigError("scenario: field \"integrator\" must be an object");
        }
        if (integ.contains("h")) config.h = number_at(integ["h"], "integrator.h");
        if (integ.contains("t_max")) config.t_max = number_at(integ["t_max"], "integrator.t_max");
        if (integ.contains("tol_eq")) {
            config.tol_eq = number_at(integ["tol_eq"], "integrator.tol_eq");
        }
        if (integ.contains("clamp_tol")) {
            config.clamp_tol = number_at(integ["clamp_tol"], "integrator.clamp_tol");
        }
    }
    config.validate();

    // x0
    const json& x0_field = require_field(doc, "x0", "x0");
    if (!x0_field.is_array() || static_cast<int>(x0_field.size()) != n) {
        throw ConfigError("scenario: field \"x0\" must list exactly " + std::to_string(n) +
                          " fractions");
    }
    std::vector<double> x0;
    double total = 0.0;
    for (size_t k = 0; k < x0_field.size(); ++k) {
        const double v = number_at(x0_field[k], "x0[" + std::to_string(k) + "]");
        if (v < -1e-12) {
            throw ConfigError("scenario: field \"x0[" + std::to_string(k) + "]\" is negative");
        }
        x0.push_back(std::max(v, 0.0));
        total += x0.back();
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "scenario: field \"x0\" sums to " << total << ", expected 1 within 1e-9";
        throw ConfigError(msg.str());
    }
    for (double& v : x0) v /= total;

    Scenario scenario{std::move(topology), std::move(profile), config, std::move(x0)};

    if (doc.contains("output")) {
        const json& output = doc["output"];
        if (!output.is_object()) {
            throw ConfigError("scenario: field \"output\" must be an object");
        }
        if (output.contains("trajectory_csv")) {
            scenario.trajectory_csv = output["trajectory_csv"].get<std::string>();
        }
        if (output.contains("summary_json")) {
            scenario.summary_json = output["summary_json"].get<std::string>();
        }
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) {
            throw ConfigError("scenario: field \"seed\" must be a nonnegative integer");
        }
        scenario.seed = doc["seed"].get<std::uint64_t>();
    }
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("scenario: cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& scenario) {
    json doc;
    doc["graph"]["nodes"] = scenario.topology.node_count();
    json edges = json::array();
    for (const Arc& arc : scenario.topology.arcs()) {
        if (arc.from < arc.to) edges.push_back({arc.from + 1, arc.to + 1});
    }
    doc["graph"]["edges"] = std::move(edges);

    json payoffs = json::array();
    for (int i = 0; i < scenario.profile.size(); ++i) {
        const PayoffFunction& f = scenario.profile.node(i);
        json spec;
        spec["type"] = f.family();
        if (f.family() == "quadratic") {
            spec["a"] = f.param_a();
            spec["c"] = f.param_c();
        } else if (f.family() == "log") {
            spec["w"] = f.param_w();
            spec["s"] = f.param_s();
        } else {
            spec["density"] = f.density_grid();
        }
        payoffs.push_back(std::move(spec));
    }
    doc["payoffs"] = std::move(payoffs);

    doc["dynamics"] = dynamics_name(scenario.config.dynamics);
    doc["x0"] = scenario.x0;
    doc["integrator"]["h"] = scenario.config.h;
    doc["integrator"]["t_max"] = scenario.config.t_max;
    doc["integrator"]["tol_eq"] = scenario.config.tol_eq;
    doc["integrator"]["clamp_tol"] = scenario.config.clamp_tol;
    doc["seed"] = scenario.seed;
    return doc.dump(2);
}

} // namespace strataflow
