#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/analysis.hpp"
#include "core/errors.hpp"
#include "core/integrator.hpp"
#include "support.hpp"

using namespace strataflow;

namespace {

SimulationConfig tight_config(Dynamics kind) {
    SimulationConfig config;
    config.dynamics = kind;
    config.tol_eq = 1e-10;
    return config;
}

} // namespace

TEST_CASE("configuration validation rejects unusable settings") {
    SimulationConfig config;
    config.validate();

    SimulationConfig bad = config;
    bad.h = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.t_max = 0.001; // below one step
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.tol_eq = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.clamp_tol = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("population states are validated before integrating") {
    CHECK_NOTHROW(require_simplex({0.25, 0.75}));
    CHECK_NOTHROW(require_simplex({1.0, 0.0}));
    CHECK_THROWS_AS(require_simplex({0.5, 0.4}), ConfigError);
    CHECK_THROWS_AS(require_simplex({-0.1, 1.1}), ConfigError);

    const Topology t = testutil::path(3);
    const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0});
    SimulationConfig config;
    CHECK_THROWS_AS(Stepper(profile, t, {1.0, 0.0}, config), ConfigError);
}

TEST_CASE("all three dynamics settle onto the equilibrium set") {
    const Topology t = testutil::path(3);
    const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0});
    const std::vector<double> x0 = {0.2, 0.5, 0.3};

    for (Dynamics kind : {Dynamics::Ssd, Dynamics::Nbrd, Dynamics::Nrpm}) {
        CAPTURE(dynamics_name(kind));
        const Trajectory run = simulate(profile, t, x0, tight_config(kind));

        CHECK(run.converged);
        CHECK(run.t_final < 200.0);
        CHECK(is_nash(profile, t, run.final_state, 1e-6).is_nash);
        CHECK(run.final_state[1] <= kSupportThreshold);

        // Mass stays put on the simplex at every recorded step.
        for (const std::vector<double>& x : run.states) {
            double total = 0.0, lowest = 1.0;
            for (double v : x) {
                total += v;
                lowest = std::min(lowest, v);
            }
            CHECK(std::abs(total - 1.0) <= 1e-9);
            CHECK(lowest >= -1e-10);
        }

        // Social utility ascends and, for the flow-driven protocols, the
        // recorded dissipation stays nonpositive.
        for (size_t k = 1; k < run.utilities.size(); ++k) {
            CHECK(run.utilities[k] >= run.utilities[k - 1] - 1e-9);
        }
        if (kind != Dynamics::Nrpm) {
            for (double rate : run.dissipations) CHECK(rate <= 1e-12);
        }
    }
}

TEST_CASE("trajectories are recorded from the start at fixed spacing") {
    const Topology t = testutil::path(3);
    const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0});
    const std::vector<double> x0 = {0.2, 0.5, 0.3};

    const Trajectory run = simulate(profile, t, x0, tight_config(Dynamics::Nbrd));
    REQUIRE(!run.times.empty());
    CHECK(run.times[0] == 0.0);
    CHECK(testutil::max_abs_diff(run.states[0], x0) == 0.0);
    for (size_t k = 1; k < run.times.size(); ++k) {
        CHECK(run.times[k] - run.times[k - 1] == doctest::Approx(0.01).epsilon(1e-9));
    }
    CHECK(run.states.size() == run.times.size());
    CHECK(run.utilities.size() == run.times.size());
    CHECK(run.residuals.size() == run.times.size());
    CHECK(run.dissipations.size() == run.times.size());
    CHECK(testutil::max_abs_diff(run.final_state, run.states.back()) == 0.0);
    CHECK(run.t_final == run.times.back());
}

TEST_CASE("repeated runs are bitwise identical") {
    const Topology t = testutil::cycle(4);
    const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0, 5.0});
    const std::vector<double> x0 = {0.1, 0.4, 0.3, 0.2};

    for (Dynamics kind : {Dynamics::Ssd, Dynamics::Nbrd, Dynamics::Nrpm}) {
        CAPTURE(dynamics_name(kind));
        const Trajectory a = simulate(profile, t, x0, tight_config(kind));
        const Trajectory b = simulate(profile, t, x0, tight_config(kind));
        REQUIRE(a.states.size() == b.states.size());
        for (size_t k = 0; k < a.states.size(); ++k) {
            CHECK(testutil::max_abs_diff(a.states[k], b.states[k]) == 0.0);
        }
        CHECK(a.t_final == b.t_final);
    }
}

TEST_CASE("the stepper exposes the same run incrementally") {
    const Topology t = testutil::path(3);
    const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0});
    const std::vector<double> x0 = {0.2, 0.5, 0.3};
    const SimulationConfig config = tight_config(Dynamics::Ssd);

    const Trajectory reference = simulate(profile, t, x0, config);
    Stepper stepper(profile, t, x0, config);

    size_t row = 0;
    CHECK(testutil::max_abs_diff(stepper.state(), reference.states[row]) == 0.0);
    while (!stepper.done()) {
        stepper.advance();
        ++row;
        REQUIRE(row < reference.states.size());
        CHECK(testutil::max_abs_diff(stepper.state(), reference.states[row]) == 0.0);
        CHECK(stepper.utility() == reference.utilities[row]);
        CHECK(stepper.residual() == reference.residuals[row]);
    }
    CHECK(row + 1 == reference.states.size());
    CHECK(stepper.converged() == reference.converged);
}

TEST_CASE("a short horizon ends without convergence") {
    const Topology t = testutil::path(3);
    const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0});

    SimulationConfig config;
    config.dynamics = Dynamics::Ssd;
    config.t_max = 0.05;
    const Trajectory run = simulate(profile, t, {0.2, 0.5, 0.3}, config);
    CHECK(!run.converged);
    CHECK(run.t_final == doctest::Approx(0.05).epsilon(1e-9));
}
