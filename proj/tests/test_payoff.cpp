#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/payoff.hpp"
#include "support.hpp"

using namespace strataflow;

TEST_CASE("quadratic family evaluates its closed forms") {
    const PayoffFunction f = PayoffFunction::quadratic(2.0, 1.0);

    CHECK(f.family() == "quadratic");
    CHECK(f.density(0.0) == doctest::Approx(-2.0));
    CHECK(f.density(1.0) == doctest::Approx(-3.0));
    CHECK(f.cumulative(0.0) == doctest::Approx(0.0));
    CHECK(f.cumulative(1.0) == doctest::Approx(-2.5));

    const PayoffFunction g = PayoffFunction::quadratic(0.0, 1.0);
    CHECK(g.cumulative(0.5) == doctest::Approx(-0.125));
    CHECK(g.density(0.5) == doctest::Approx(-0.5));
    CHECK(g.max_density_slope() == doctest::Approx(1.0));

    CHECK_THROWS_AS(PayoffFunction::quadratic(0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(PayoffFunction::quadratic(0.0, -1.0), ConfigError);
}

TEST_CASE("log family uses the unnormalized cumulative") {
    const PayoffFunction f = PayoffFunction::logarithmic(1.0, 1.0);
    CHECK(f.cumulative(1.0) == doctest::Approx(std::log(2.0)));
    CHECK(f.density(0.0) == doctest::Approx(1.0));
    CHECK(f.density(1.0) == doctest::Approx(0.5));

    // p(0) = w ln(s) is deliberately not subtracted here; social utility
    // removes it per node.
    const PayoffFunction g = PayoffFunction::logarithmic(2.0, 0.5);
    CHECK(g.cumulative(0.0) == doctest::Approx(2.0 * std::log(0.5)));
    CHECK(g.cumulative(1.0) == doctest::Approx(2.0 * std::log(1.5)));
    CHECK(g.max_density_slope() == doctest::Approx(2.0 / 0.25));

    CHECK_THROWS_AS(PayoffFunction::logarithmic(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(PayoffFunction::logarithmic(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(PayoffFunction::logarithmic(-1.0, 1.0), ConfigError);
}

TEST_CASE("custom family interpolates a sampled density") {
    // Samples of u(y) = 1 - y on the 101-point grid; p(y) = y - y^2/2 exactly
    // because the trapezoid rule is exact for affine integrands.
    std::vector<double> grid(101);
    for (int k = 0; k <= 100; ++k) grid[k] = 1.0 - static_cast<double>(k) / 100.0;
    const PayoffFunction f = PayoffFunction::custom(grid);

    CHECK(f.family() == "custom");
    CHECK(f.density(0.0) == doctest::Approx(1.0));
    CHECK(f.density(0.375) == doctest::Approx(0.625));
    CHECK(f.cumulative(1.0) == doctest::Approx(0.5));
    CHECK(f.cumulative(0.5) == doctest::Approx(0.375));

    const SaturatedInverse inv = f.inverse_density(0.35);
    CHECK(inv.flag == InverseRange::Within);
    CHECK(inv.value == doctest::Approx(0.65).epsilon(1e-10));

    CHECK_THROWS_AS(PayoffFunction::custom(std::vector<double>(50, 0.0)), ConfigError);
    std::vector<double> flat(101, 1.0);
    CHECK_THROWS_AS(PayoffFunction::custom(flat), ConfigError); // not decreasing
}

TEST_CASE("cumulative rejects arguments outside the unit interval") {
    const PayoffFunction f = PayoffFunction::quadratic(0.0, 1.0);
    CHECK_THROWS_AS(f.cumulative(-0.1), ConfigError);
    CHECK_THROWS_AS(f.cumulative(1.1), ConfigError);
}

TEST_CASE("inverse density clamps out-of-range levels and flags them") {
    const PayoffFunction f = PayoffFunction::quadratic(0.0, 1.0); // u(y) = -y

    SUBCASE("within range") {
        const SaturatedInverse inv = f.inverse_density(-0.3);
        CHECK(inv.flag == InverseRange::Within);
        CHECK(inv.value == doctest::Approx(0.3));
        CHECK(std::abs(f.density(inv.value) - (-0.3)) <= 1e-12);
    }
    SUBCASE("level above u(0) pins to the empty node") {
        const SaturatedInverse inv = f.inverse_density(0.5);
        CHECK(inv.flag == InverseRange::BelowRange);
        CHECK(inv.value == 0.0);
    }
    SUBCASE("level below u(1) pins to the full node") {
        const SaturatedInverse inv = f.inverse_density(-1.5);
        CHECK(inv.flag == InverseRange::AboveRange);
        CHECK(inv.value == 1.0);
    }
}

TEST_CASE("social utility sums per-node payoff gains") {
    SUBCASE("quadratic example") {
        const PayoffProfile profile = testutil::quadratic_profile({0.0, 5.0, 0.0});
        CHECK(profile.social_utility({0.5, 0.0, 0.5}) == doctest::Approx(-0.25));
    }
    SUBCASE("suboptimality gap instance") {
        const PayoffProfile profile = testutil::quadratic_profile({2.0, 2.0, 0.0});
        CHECK(profile.social_utility({0.1, 0.1, 0.8}) == doctest::Approx(-0.73));
    }
    SUBCASE("log nodes subtract their nonzero p(0)") {
        PayoffProfile profile({PayoffFunction::logarithmic(1.0, 0.5)});
        CHECK(profile.social_utility({1.0}) == doctest::Approx(std::log(3.0)));
        CHECK(profile.social_utility({0.0}) == doctest::Approx(0.0));
    }
}

TEST_CASE("level solve equalizes densities at the requested mass") {
    SUBCASE("three symmetric nodes share the unit mass at -1/3") {
        const PayoffProfile profile = testutil::quadratic_profile({0.0, 0.0, 0.0});
        const double eta = level_solve(profile, {0, 1, 2}, 1.0);
        CHECK(eta == doctest::Approx(-1.0 / 3.0).epsilon(1e-9));
    }
    SUBCASE("a handicapped node is pushed exactly to its entry level") {
        const PayoffProfile profile = testutil::quadratic_profile({1.0, 0.0});
        const double eta = level_solve(profile, {0, 1}, 1.0);
        CHECK(eta == doctest::Approx(-1.0).epsilon(1e-9));
    }
    SUBCASE("level is monotone decreasing in mass") {
        const PayoffProfile profile = testutil::quadratic_profile({0.0, 1.0});
        double prev = level_solve(profile, {0, 1}, 0.1);
        for (double mass : {0.5, 1.0, 1.5, 2.0}) {
            const double eta = level_solve(profile, {0, 1}, mass);
            CHECK(eta < prev);
            prev = eta;
        }
    }
    SUBCASE("zero mass sits at the top of the bracket") {
        const PayoffProfile profile = testutil::quadratic_profile({0.0});
        CHECK(std::abs(level_solve(profile, {0}, 0.0)) <= 1e-11);
    }
    SUBCASE("infeasible masses are rejected") {
        const PayoffProfile profile = testutil::quadratic_profile({0.0, 0.0});
        CHECK_THROWS_AS(level_solve(profile, {0, 1}, 2.5), NumericError);
        CHECK_THROWS_AS(level_solve(profile, {0, 1}, -0.1), NumericError);
    }
}

TEST_CASE("profile-level accessors aggregate over nodes") {
    PayoffProfile profile({PayoffFunction::quadratic(0.0, 2.0),
                           PayoffFunction::logarithmic(1.0, 0.5)});
    CHECK(profile.size() == 2);
    CHECK(profile.max_density_slope() == doctest::Approx(4.0)); // log node dominates
    CHECK(profile.density(0, 0.5) == doctest::Approx(-1.0));
    CHECK(profile.node(1).family() == "log");
}
