// Exercises the C boundary the way an external consumer would: only
// strataflow.h, no core headers, shared library linkage.

#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "strataflow.h"

namespace {

const char* kTriangle = R"({
  "graph": {"nodes": 3, "edges": [[1, 2], [2, 3], [1, 3]]},
  "payoffs": [
    {"type": "quadratic", "a": 0.0},
    {"type": "quadratic", "a": 5.0},
    {"type": "quadratic", "a": 0.0}
  ],
  "dynamics": "nbrd",
  "x0": [0.2, 0.5, 0.3],
  "integrator": {"tol_eq": 1e-10},
  "output": {"trajectory_csv": "capi.csv", "summary_json": "capi.json"},
  "seed": 7
})";

struct ScenarioGuard {
    sf_scenario* handle = nullptr;
    ~ScenarioGuard() { sf_scenario_free(handle); }
};

} // namespace

TEST_CASE("scenario accessors reflect the parsed document") {
    ScenarioGuard s;
    REQUIRE(sf_scenario_parse(kTriangle, &s.handle) == SF_OK);

    CHECK(sf_scenario_nodes(s.handle) == 3);
    CHECK(std::string(sf_scenario_dynamics(s.handle)) == "nbrd");
    CHECK(std::string(sf_scenario_trajectory_path(s.handle)) == "capi.csv");
    CHECK(std::string(sf_scenario_summary_path(s.handle)) == "capi.json");
    CHECK(sf_scenario_seed(s.handle) == 7);

    double x[3] = {0, 0, 0};
    REQUIRE(sf_scenario_initial_state(s.handle, x) == SF_OK);
    CHECK(x[0] == 0.2);
    CHECK(x[1] == 0.5);
    CHECK(x[2] == 0.3);
}

TEST_CASE("failures set a status and a thread-local message") {
    sf_scenario* raw = nullptr;
    CHECK(sf_scenario_parse("{broken", &raw) == SF_ERR_CONFIG);
    CHECK(raw == nullptr);
    CHECK(std::strlen(sf_last_error()) > 0);

    CHECK(sf_scenario_parse(nullptr, &raw) == SF_ERR_CONFIG);
    CHECK(sf_scenario_load("/nonexistent/path.json", &raw) == SF_ERR_CONFIG);

    ScenarioGuard s;
    REQUIRE(sf_scenario_parse(kTriangle, &s.handle) == SF_OK);
    double u = 0.0;
    const double off_simplex[3] = {0.5, 0.4, 0.0};
    CHECK(sf_social_utility(s.handle, off_simplex, &u) == SF_ERR_CONFIG);
    CHECK(std::string(sf_last_error()).find("sum") != std::string::npos);
    CHECK(sf_social_utility(s.handle, nullptr, &u) == SF_ERR_CONFIG);
}

TEST_CASE("pointwise analysis matches the model's closed forms") {
    ScenarioGuard s;
    REQUIRE(sf_scenario_parse(kTriangle, &s.handle) == SF_OK);

    const double nash_point[3] = {0.5, 0.0, 0.5};

    double u = 0.0;
    REQUIRE(sf_social_utility(s.handle, nash_point, &u) == SF_OK);
    CHECK(u == doctest::Approx(-0.25));

    int flag = 0;
    double worst = 1.0;
    int support[3] = {-1, -1, -1};
    REQUIRE(sf_check_nash(s.handle, nash_point, 1e-8, &flag, &worst, support) == SF_OK);
    CHECK(flag == 1);
    CHECK(worst == 0.0);
    CHECK(support[0] == 1);
    CHECK(support[1] == 0);
    CHECK(support[2] == 1);

    double wf[3] = {0, 0, 0};
    double level = 0.0;
    REQUIRE(sf_global_waterfill(s.handle, wf, &level) == SF_OK);
    CHECK(wf[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(wf[1] == 0.0);
    CHECK(wf[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(level == doctest::Approx(-0.5).epsilon(1e-9));

    double residual = 1.0;
    REQUIRE(sf_equilibrium_residual(s.handle, nash_point, &residual) == SF_OK);
    CHECK(residual <= 1e-9);
}

TEST_CASE("best response and network reallocation cross the boundary intact") {
    ScenarioGuard s;
    REQUIRE(sf_scenario_parse(kTriangle, &s.handle) == SF_OK);

    const double x[3] = {0.2, 0.5, 0.3};

    double d[3] = {0, 0, 0};
    double eta = 0.0;
    int eta_defined = 0;
    REQUIRE(sf_best_response(s.handle, x, 1, d, &eta, &eta_defined) == SF_OK);
    CHECK(eta_defined == 1);
    CHECK(eta == doctest::Approx(-0.5).epsilon(1e-9));
    CHECK(d[0] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(d[1] == 0.0);
    CHECK(d[2] == doctest::Approx(0.2).epsilon(1e-9));

    CHECK(sf_best_response(s.handle, x, 5, d, &eta, &eta_defined) == SF_ERR_CONFIG);

    double z[3] = {0, 0, 0};
    double plan[9] = {0};
    double kkt = 1.0;
    REQUIRE(sf_nrpm_solve(s.handle, x, z, plan, &kkt) == SF_OK);
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(z[1] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(z[2] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(kkt <= 1e-8);
    double row1 = plan[3] + plan[4] + plan[5];
    CHECK(row1 == doctest::Approx(0.5).epsilon(1e-9)); // node 2 routes its mass

    int origin_comp[3] = {9, 9, 9};
    int dest_comp[3] = {9, 9, 9};
    int n_components = 0;
    REQUIRE(sf_nrpm_components(s.handle, x, origin_comp, dest_comp, &n_components) == SF_OK);
    CHECK(n_components >= 1);
    CHECK(origin_comp[1] >= 0);  // the draining node originates somewhere
    CHECK(dest_comp[1] == -1);   // nothing lands on the handicapped node
}

TEST_CASE("the simulation loop converges and reports its metrics") {
    ScenarioGuard s;
    REQUIRE(sf_scenario_parse(kTriangle, &s.handle) == SF_OK);

    sf_sim* raw = nullptr;
    REQUIRE(sf_sim_create(s.handle, &raw) == SF_OK);

    CHECK(sf_sim_time(raw) == 0.0);
    double prev_u = sf_sim_utility(raw);
    int steps = 0;
    while (!sf_sim_done(raw)) {
        REQUIRE(sf_sim_step(raw) == SF_OK);
        const double u = sf_sim_utility(raw);
        CHECK(u >= prev_u - 1e-9);
        prev_u = u;
        ++steps;
        REQUIRE(steps < 100000);
    }
    CHECK(sf_sim_converged(raw) == 1);

    double x[3] = {0, 0, 0};
    REQUIRE(sf_sim_state(raw, x) == SF_OK);
    CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(x[1] <= 1e-9);
    CHECK(x[2] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(sf_sim_residual(raw) <= 1e-10);
    CHECK(sf_sim_dissipation(raw) <= 1e-12);

    int flag = 0;
    double worst = 0.0;
    REQUIRE(sf_check_nash(s.handle, x, 1e-6, &flag, &worst, nullptr) == SF_OK);
    CHECK(flag == 1);

    sf_sim_free(raw);
    sf_sim_free(nullptr); // must be a safe no-op
    sf_scenario_free(nullptr);
}

TEST_CASE("the embedded property suite reports through the boundary") {
    char* report = nullptr;
    const sf_status status = sf_validate(7, 2, &report);
    REQUIRE(report != nullptr);
    CHECK(status == SF_OK);
    CHECK(std::string(report).find("[PASS]") != std::string::npos);
    sf_string_free(report);
    sf_string_free(nullptr);
}
