// Drives the installed command-line binary end to end: real process, real
// files, exit codes as contracted. The binary path comes in from the build.

#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#ifndef STRATAFLOW_CLI_PATH
#error "STRATAFLOW_CLI_PATH must point at the command-line binary"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(STRATAFLOW_CLI_PATH) + " " + args + " 2>&1";
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (size_t got = fread(buffer, 1, sizeof(buffer), pipe)) {
        result.output.append(buffer, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

/// Scratch directory for one test case; removed on destruction.
struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() /
              ("strataflow-cli-" + std::to_string(::getpid()) + "-" +
               std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
    std::string file(const std::string& name, const std::string& text) const {
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        out << text;
        return p.string();
    }
};

json triangle_scenario(const Scratch& scratch, double t_max = 200.0) {
    json doc;
    doc["graph"] = {{"nodes", 3}, {"edges", {{1, 2}, {2, 3}, {1, 3}}}};
    doc["payoffs"] = {{{"type", "quadratic"}, {"a", 0.0}},
                      {{"type", "quadratic"}, {"a", 5.0}},
                      {{"type", "quadratic"}, {"a", 0.0}}};
    doc["dynamics"] = "nbrd";
    doc["x0"] = {0.2, 0.5, 0.3};
    doc["integrator"] = {{"tol_eq", 1e-10}, {"t_max", t_max}};
    doc["output"] = {{"trajectory_csv", (scratch.dir / "run.csv").string()},
                     {"summary_json", (scratch.dir / "run.json").string()}};
    doc["seed"] = 42;
    return doc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("simulate produces the trajectory, the summary, and exit code 0") {
    Scratch scratch;
    const std::string path = scratch.file("tri.json", triangle_scenario(scratch).dump());

    const RunResult run = run_cli("simulate " + path);
    CHECK(run.exit_code == 0);

    const json summary = json::parse(slurp(scratch.dir / "run.json"));
    CHECK(summary["converged"] == true);
    CHECK(summary["t_final"].is_number());
    REQUIRE(summary["x_final"].size() == 3);
    CHECK(summary["x_final"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(summary["x_final"][1].get<double>() <= 1e-9);
    CHECK(summary["U_final"].get<double>() == doctest::Approx(-0.25).epsilon(1e-6));
    CHECK(summary["nash"]["is_nash"] == true);
    CHECK(summary["nash"]["worst_violation"].is_number());

    // stdout repeats the summary verbatim.
    CHECK(json::parse(run.output) == summary);

    const std::string csv = slurp(scratch.dir / "run.csv");
    CHECK(csv.rfind("t,x1,x2,x3,U,residual,dissipation\n", 0) == 0);
    const size_t rows = static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n'));
    CHECK(rows >= 3); // header, start state, at least one step
}

TEST_CASE("identical scenarios yield byte-identical trajectories") {
    Scratch scratch;
    const std::string path = scratch.file("tri.json", triangle_scenario(scratch).dump());

    REQUIRE(run_cli("simulate " + path).exit_code == 0);
    const std::string first = slurp(scratch.dir / "run.csv");
    REQUIRE(run_cli("simulate " + path).exit_code == 0);
    const std::string second = slurp(scratch.dir / "run.csv");
    CHECK(first == second);
    CHECK(!first.empty());
}

TEST_CASE("an exhausted horizon exits with the non-convergence code") {
    Scratch scratch;
    const std::string path =
        scratch.file("short.json", triangle_scenario(scratch, 0.05).dump());

    const RunResult run = run_cli("simulate " + path);
    CHECK(run.exit_code == 3);
    const json summary = json::parse(slurp(scratch.dir / "run.json"));
    CHECK(summary["converged"] == false);
}

TEST_CASE("configuration problems exit with code 1 and a pointed message") {
    Scratch scratch;

    SUBCASE("state off the simplex") {
        json doc = triangle_scenario(scratch);
        doc["x0"] = {0.2, 0.5, 0.2};
        const std::string path = scratch.file("bad.json", doc.dump());
        const RunResult run = run_cli("simulate " + path);
        CHECK(run.exit_code == 1);
        CHECK(run.output.find("x0") != std::string::npos);
    }
    SUBCASE("unknown payoff family") {
        json doc = triangle_scenario(scratch);
        doc["payoffs"][2]["type"] = "cubic";
        const std::string path = scratch.file("bad.json", doc.dump());
        const RunResult run = run_cli("simulate " + path);
        CHECK(run.exit_code == 1);
        CHECK(run.output.find("payoffs[2].type") != std::string::npos);
    }
    SUBCASE("missing scenario file") {
        const RunResult run = run_cli("simulate " + (scratch.dir / "absent.json").string());
        CHECK(run.exit_code == 1);
        CHECK(run.output.find("cannot open") != std::string::npos);
    }
    SUBCASE("unknown subcommand") {
        CHECK(run_cli("frobnicate").exit_code == 1);
    }
    SUBCASE("missing required option") {
        const std::string path =
            scratch.file("tri.json", triangle_scenario(scratch).dump());
        CHECK(run_cli("best-response " + path).exit_code == 1);
    }
}

TEST_CASE("check-ne reports membership for a supplied state") {
    Scratch scratch;
    const std::string path = scratch.file("tri.json", triangle_scenario(scratch).dump());

    SUBCASE("the balanced split is accepted") {
        const RunResult run = run_cli("check-ne " + path + " --state 0.5,0,0.5");
        CHECK(run.exit_code == 0);
        const json out = json::parse(run.output);
        CHECK(out["is_nash"] == true);
        CHECK(out["worst_violation"].get<double>() == 0.0);
        CHECK(out["support"] == json::array({1, 3}));
    }
    SUBCASE("a lopsided state is reported, not rejected") {
        const RunResult run = run_cli("check-ne " + path + " --state 1,0,0");
        CHECK(run.exit_code == 0);
        const json out = json::parse(run.output);
        CHECK(out["is_nash"] == false);
        CHECK(out["worst_violation"].get<double>() == doctest::Approx(1.0));
    }
    SUBCASE("the initial state is the default subject") {
        const RunResult run = run_cli("check-ne " + path);
        CHECK(run.exit_code == 0);
        CHECK(json::parse(run.output)["is_nash"] == false);
    }
    SUBCASE("malformed states are rejected") {
        CHECK(run_cli("check-ne " + path + " --state 0.5,0.5").exit_code == 1);
        CHECK(run_cli("check-ne " + path + " --state a,b,c").exit_code == 1);
    }
}

TEST_CASE("equilibria prints the waterfill point with its Nash report") {
    Scratch scratch;
    const std::string path = scratch.file("tri.json", triangle_scenario(scratch).dump());

    const RunResult run = run_cli("equilibria " + path);
    CHECK(run.exit_code == 0);
    const json out = json::parse(run.output);
    CHECK(out["x"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(out["x"][1].get<double>() == 0.0);
    CHECK(out["level"].get<double>() == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(out["nash"]["is_nash"] == true);
    CHECK(out["nash"]["support"] == json::array({1, 3}));
}

TEST_CASE("best-response and nrpm-step report reallocations at x0") {
    Scratch scratch;
    const std::string path = scratch.file("tri.json", triangle_scenario(scratch).dump());

    const RunResult br = run_cli("best-response " + path + " --node 2");
    CHECK(br.exit_code == 0);
    const json response = json::parse(br.output);
    CHECK(response["node"] == 2);
    CHECK(response["eta"].get<double>() == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(response["d"]["1"].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(response["d"]["3"].get<double>() == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(response["support"] == json::array({1, 3}));

    CHECK(run_cli("best-response " + path + " --node 9").exit_code == 1);

    const RunResult step = run_cli("nrpm-step " + path);
    CHECK(step.exit_code == 0);
    const json plan = json::parse(step.output);
    CHECK(plan["z"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(plan["z"][1].get<double>() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(plan["kkt_residual"].get<double>() <= 1e-8);
    REQUIRE(plan["od_components"].size() >= 1);
    bool node2_ships = false;
    for (const json& flow : plan["d"]) {
        CHECK(flow["mass"].get<double>() > 1e-9);
        if (flow["from"] == 2 && flow["to"] != 2) node2_ships = true;
    }
    CHECK(node2_ships);
}

TEST_CASE("the validation subcommand runs a small suite cleanly") {
    const RunResult run = run_cli("validate --seed 7 --cases 2");
    CHECK(run.exit_code == 0);
    CHECK(run.output.find("[PASS]") != std::string::npos);
    CHECK(run.output.find("checks passed") != std::string::npos);
    CHECK(run.output.find("[FAIL]") == std::string::npos);
}
