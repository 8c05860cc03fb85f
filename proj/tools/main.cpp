// Command-line front end for the strataflow library. Talks to the core
// exclusively through the C boundary (strataflow.h); JSON/CSV plumbing
// stays on this side.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "strataflow.h"

namespace {

using json = nlohmann::ordered_json;

/// Shortest representation that round-trips the exact double.
std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int report_failure(sf_status status) {
    std::cerr << "error: " << sf_last_error() << "\n";
    return static_cast<int>(status);
}

struct ScenarioDeleter {
    void operator()(sf_scenario* s) const { sf_scenario_free(s); }
};
using ScenarioPtr = std::unique_ptr<sf_scenario, ScenarioDeleter>;

struct SimDeleter {
    void operator()(sf_sim* s) const { sf_sim_free(s); }
};
using SimPtr = std::unique_ptr<sf_sim, SimDeleter>;

ScenarioPtr load_or_null(const std::string& path, sf_status& status) {
    sf_scenario* raw = nullptr;
    status = sf_scenario_load(path.c_str(), &raw);
    return ScenarioPtr(raw);
}

std::vector<double> parse_state_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string token = text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw std::runtime_error("--state: '" + token + "' is not a number");
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return values;
}

json nash_to_json(int is_nash, double worst, const std::vector<int>& support_flags) {
    json nash;
    nash["is_nash"] = is_nash != 0;
    nash["worst_violation"] = worst;
    json support = json::array();
    for (std::size_t i = 0; i < support_flags.size(); ++i) {
        if (support_flags[i]) support.push_back(static_cast<int>(i) + 1);
    }
    nash["support"] = support;
    return nash;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const std::string& path) {
    sf_status status = SF_OK;
    const ScenarioPtr scenario = load_or_null(path, status);
    if (status != SF_OK) return report_failure(status);

    const int n = sf_scenario_nodes(scenario.get());

    sf_sim* raw_sim = nullptr;
    status = sf_sim_create(scenario.get(), &raw_sim);
    if (status != SF_OK) return report_failure(status);
    const SimPtr sim(raw_sim);

    const std::string csv_path = sf_scenario_trajectory_path(scenario.get());
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
        std::cerr << "error: cannot open trajectory output '" << csv_path << "'\n";
        return static_cast<int>(SF_ERR_CONFIG);
    }

    csv << "t";
    for (int i = 1; i <= n; ++i) csv << ",x" << i;
    csv << ",U,residual,dissipation\n";

    std::vector<double> x(static_cast<std::size_t>(n));
    const auto write_row = [&] {
        sf_sim_state(sim.get(), x.data());
        csv << fmt_double(sf_sim_time(sim.get()));
        for (double v : x) csv << ',' << fmt_double(v);
        csv << ',' << fmt_double(sf_sim_utility(sim.get()));
        csv << ',' << fmt_double(sf_sim_residual(sim.get()));
        csv << ',' << fmt_double(sf_sim_dissipation(sim.get()));
        csv << '\n';
    };

    write_row();
    while (!sf_sim_done(sim.get())) {
        status = sf_sim_step(sim.get());
        if (status != SF_OK) return report_failure(status);
        write_row();
    }
    csv.close();

    const bool converged = sf_sim_converged(sim.get()) != 0;
    sf_sim_state(sim.get(), x.data());

    double u_final = 0.0;
    status = sf_social_utility(scenario.get(), x.data(), &u_final);
    if (status != SF_OK) return report_failure(status);

    int nash_flag = 0;
    double worst = 0.0;
    status = sf_check_nash(scenario.get(), x.data(), 1e-6, &nash_flag, &worst, nullptr);
    if (status != SF_OK) return report_failure(status);

    json summary;
    summary["converged"] = converged;
    summary["t_final"] = sf_sim_time(sim.get());
    summary["x_final"] = x;
    summary["U_final"] = u_final;
    summary["nash"] = {{"is_nash", nash_flag != 0}, {"worst_violation", worst}};

    const std::string summary_path = sf_scenario_summary_path(scenario.get());
    std::ofstream summary_file(summary_path, std::ios::binary);
    if (!summary_file) {
        std::cerr << "error: cannot open summary output '" << summary_path << "'\n";
        return static_cast<int>(SF_ERR_CONFIG);
    }
    summary_file << summary.dump(2) << "\n";
    summary_file.close();

    std::cout << summary.dump(2) << "\n";
    return converged ? 0 : static_cast<int>(SF_ERR_NO_CONVERGENCE);
}

// ---------------------------------------------------------------------------
// best-response
// ---------------------------------------------------------------------------

int run_best_response(const std::string& path, int node_one_based) {
    sf_status status = SF_OK;
    const ScenarioPtr scenario = load_or_null(path, status);
    if (status != SF_OK) return report_failure(status);

    const int n = sf_scenario_nodes(scenario.get());
    if (node_one_based < 1 || node_one_based > n) {
        std::cerr << "error: --node must be between 1 and " << n << "\n";
        return static_cast<int>(SF_ERR_CONFIG);
    }

    std::vector<double> x(static_cast<std::size_t>(n));
    sf_scenario_initial_state(scenario.get(), x.data());

    std::vector<double> d(static_cast<std::size_t>(n));
    double eta = 0.0;
    int eta_defined = 0;
    status = sf_best_response(scenario.get(), x.data(), node_one_based - 1, d.data(), &eta,
                              &eta_defined);
    if (status != SF_OK) return report_failure(status);

    json out;
    out["node"] = node_one_based;
    json alloc = json::object();
    json support = json::array();
    for (int j = 0; j < n; ++j) {
        if (d[static_cast<std::size_t>(j)] > 0.0) {
            alloc[std::to_string(j + 1)] = d[static_cast<std::size_t>(j)];
            support.push_back(j + 1);
        }
    }
    out["d"] = alloc;
    out["eta"] = eta_defined ? json(eta) : json(nullptr);
    out["support"] = support;
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// nrpm-step
// ---------------------------------------------------------------------------

int run_nrpm_step(const std::string& path) {
    sf_status status = SF_OK;
    const ScenarioPtr scenario = load_or_null(path, status);
    if (status != SF_OK) return report_failure(status);

    const int n = sf_scenario_nodes(scenario.get());
    std::vector<double> x(static_cast<std::size_t>(n));
    sf_scenario_initial_state(scenario.get(), x.data());

    std::vector<double> z(static_cast<std::size_t>(n));
    std::vector<double> d(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    double kkt = 0.0;
    status = sf_nrpm_solve(scenario.get(), x.data(), z.data(), d.data(), &kkt);
    if (status != SF_OK) return report_failure(status);

    std::vector<int> origin_comp(static_cast<std::size_t>(n));
    std::vector<int> dest_comp(static_cast<std::size_t>(n));
    int n_components = 0;
    status = sf_nrpm_components(scenario.get(), x.data(), origin_comp.data(),
                                dest_comp.data(), &n_components);
    if (status != SF_OK) return report_failure(status);

    json out;
    out["z"] = z;
    json flows = json::array();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double mass = d[static_cast<std::size_t>(i * n + j)];
            if (mass > 1e-9) {
                flows.push_back({{"from", i + 1}, {"to", j + 1}, {"mass", mass}});
            }
        }
    }
    out["d"] = flows;
    json components = json::array();
    for (int r = 0; r < n_components; ++r) {
        json origins = json::array();
        json destinations = json::array();
        for (int i = 0; i < n; ++i) {
            if (origin_comp[static_cast<std::size_t>(i)] == r) origins.push_back(i + 1);
            if (dest_comp[static_cast<std::size_t>(i)] == r) destinations.push_back(i + 1);
        }
        components.push_back({{"origins", origins}, {"destinations", destinations}});
    }
    out["od_components"] = components;
    out["kkt_residual"] = kkt;
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// check-ne / equilibria
// ---------------------------------------------------------------------------

int run_check_ne(const std::string& path, const std::string& state_csv, double tol) {
    sf_status status = SF_OK;
    const ScenarioPtr scenario = load_or_null(path, status);
    if (status != SF_OK) return report_failure(status);

    const int n = sf_scenario_nodes(scenario.get());
    std::vector<double> x(static_cast<std::size_t>(n));
    if (state_csv.empty()) {
        sf_scenario_initial_state(scenario.get(), x.data());
    } else {
        x = parse_state_list(state_csv);
        if (static_cast<int>(x.size()) != n) {
            std::cerr << "error: --state needs " << n << " comma-separated values, got "
                      << x.size() << "\n";
            return static_cast<int>(SF_ERR_CONFIG);
        }
    }

    int nash_flag = 0;
    double worst = 0.0;
    std::vector<int> support(static_cast<std::size_t>(n), 0);
    status = sf_check_nash(scenario.get(), x.data(), tol, &nash_flag, &worst, support.data());
    if (status != SF_OK) return report_failure(status);

    std::cout << nash_to_json(nash_flag, worst, support).dump(2) << "\n";
    return 0;
}

int run_equilibria(const std::string& path) {
    sf_status status = SF_OK;
    const ScenarioPtr scenario = load_or_null(path, status);
    if (status != SF_OK) return report_failure(status);

    const int n = sf_scenario_nodes(scenario.get());
    std::vector<double> x(static_cast<std::size_t>(n));
    double level = 0.0;
    status = sf_global_waterfill(scenario.get(), x.data(), &level);
    if (status != SF_OK) return report_failure(status);

    int nash_flag = 0;
    double worst = 0.0;
    std::vector<int> support(static_cast<std::size_t>(n), 0);
    status = sf_check_nash(scenario.get(), x.data(), 1e-10, &nash_flag, &worst,
                           support.data());
    if (status != SF_OK) return report_failure(status);

    json out;
    out["x"] = x;
    out["level"] = level;
    out["nash"] = nash_to_json(nash_flag, worst, support);
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int run_validate(std::uint64_t seed, int cases) {
    char* report = nullptr;
    const sf_status status = sf_validate(seed, cases, &report);
    if (report) {
        std::cout << report;
        sf_string_free(report);
    }
    if (status == SF_OK) return 0;
    if (status == SF_ERR_VALIDATION) return static_cast<int>(status);
    return report_failure(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stratified population dynamics on networks"};
    app.require_subcommand(1);

    std::string scenario_path;
    int node = 1;
    std::string state_csv;
    double tol = 1e-10;
    std::uint64_t seed = 42;
    int cases = 50;

    CLI::App* simulate = app.add_subcommand(
        "simulate", "integrate the configured dynamics and write CSV + summary");
    simulate->add_option("file", scenario_path, "scenario JSON file")->required();

    CLI::App* best_response = app.add_subcommand(
        "best-response", "optimal reallocation of one node's mass at the initial state");
    best_response->add_option("file", scenario_path, "scenario JSON file")->required();
    best_response->add_option("--node", node, "node (1-based)")->required();

    CLI::App* nrpm_step = app.add_subcommand(
        "nrpm-step", "network-wide optimal reallocation at the initial state");
    nrpm_step->add_option("file", scenario_path, "scenario JSON file")->required();

    CLI::App* check_ne = app.add_subcommand(
        "check-ne", "Nash membership of the initial state or --state");
    check_ne->add_option("file", scenario_path, "scenario JSON file")->required();
    check_ne->add_option("--state", state_csv, "comma-separated state overriding x0");
    check_ne->add_option("--tol", tol, "acceptance tolerance (default 1e-10)");

    CLI::App* equilibria = app.add_subcommand(
        "equilibria", "global social-utility maximizer and its Nash report");
    equilibria->add_option("file", scenario_path, "scenario JSON file")->required();

    CLI::App* validate = app.add_subcommand(
        "validate", "randomized model property suite");
    validate->add_option("--seed", seed, "RNG seed (default 42)");
    validate->add_option("--cases", cases, "number of random instances (default 50)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(SF_ERR_CONFIG);
    }

    try {
        if (simulate->parsed()) return run_simulate(scenario_path);
        if (best_response->parsed()) return run_best_response(scenario_path, node);
        if (nrpm_step->parsed()) return run_nrpm_step(scenario_path);
        if (check_ne->parsed()) return run_check_ne(scenario_path, state_csv, tol);
        if (equilibria->parsed()) return run_equilibria(scenario_path);
        if (validate->parsed()) return run_validate(seed, cases);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(SF_ERR_CONFIG);
    }
    return static_cast<int>(SF_ERR_CONFIG);
}
