#include "payoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace strataflow {

namespace {

void require_unit_interval(double y, const char* where) {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw ConfigError(std::string(where) + ": argument " + std::to_string(y) +
                          " outside [0, 1]");
    }
}

} // namespace

PayoffFunction PayoffFunction::quadratic(double a, double c) {
    if (!(c > 0.0) || !std::isfinite(a) || !std::isfinite(c)) {
        throw ConfigError("payoff: quadratic family needs finite a and c > 0");
    }
    PayoffFunction f;
    f.family_ = "quadratic";
    f.a_ = a;
    f.c_ = c;
    return f;
}

PayoffFunction PayoffFunction::logarithmic(double w, double s) {
    if (!(w > 0.0) || !(s > 0.0) || !std::isfinite(w) || !std::isfinite(s)) {
        throw ConfigError("payoff: log family needs w > 0 and s > 0");
    }
    PayoffFunction f;
    f.family_ = "log";
    f.w_ = w;
    f.s_ = s;
    return f;
}

PayoffFunction PayoffFunction::custom(std::vector<double> density_grid) {
    if (density_grid.size() < 101) {
        throw ConfigError("payoff: custom density grid needs at least 101 samples, got " +
                          std::to_string(density_grid.size()));
    }
    for (size_t k = 0; k < density_grid.size(); ++k) {
        if (!std::isfinite(density_grid[k])) {
            throw ConfigError("payoff: custom density sample " + std::to_string(k) +
                              " is not finite");
        }
        if (k > 0 && !(density_grid[k] < density_grid[k - 1])) {
            throw ConfigError("payoff: custom density must be strictly decreasing; "
                              "samples " + std::to_string(k - 1) + " and " + std::to_string(k) +
                              " are out of order");
        }
    }

    PayoffFunction f;
    f.family_ = "custom";
    f.grid_ = std::move(density_grid);

    // Exact trapezoid prefix sums give p on the grid with p(0) = 0.
    const size_t n = f.grid_.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    f.grid_cumulative_.resize(n, 0.0);
    for (size_t k = 1; k < n; ++k) {
        f.grid_cumulative_[k] =
            f.grid_cumulative_[k - 1] + 0.5 * h * (f.grid_[k - 1] + f.grid_[k]);
    }
    return f;
}

double PayoffFunction::cumulative(double y) const {
    require_unit_interval(y, "cumulative");
    if (family_ == "quadratic") return -(0.5 * c_) * y * y - a_ * y;
    if (family_ == "log") return w_ * std::log(y + s_);

    // custom: trapezoid prefix plus the partial cell
    const size_t n = grid_.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    const double pos = y / h;
    size_t k = std::min(static_cast<size_t>(pos), n - 2);
    const double t = y - static_cast<double>(k) * h; // offset into cell k
    const double u_left = grid_[k];
    const double slope = (grid_[k + 1] - grid_[k]) / h;
    return grid_cumulative_[k] + u_left * t + 0.5 * slope * t * t;
}

double PayoffFunction::density(double y) const {
    require_unit_interval(y, "density");
    if (family_ == "quadratic") return -c_ * y - a_;
    if (family_ == "log") return w_ / (y + s_);

    const size_t n = grid_.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    const double pos = y / h;
    size_t k = std::min(static_cast<size_t>(pos), n - 2);
    const double t = (y - static_cast<double>(k) * h) / h;
    return grid_[k] + (grid_[k + 1] - grid_[k]) * t;
}

SaturatedInverse PayoffFunction::inverse_density(double v) const {
    const double u0 = density(0.0);
    const double u1 = density(1.0);
    if (v > u0) return {0.0, InverseRange::BelowRange};
    if (v < u1) return {1.0, InverseRange::AboveRange};

    if (family_ == "quadratic") {
        double y = -(v + a_) / c_;
        return {std::clamp(y, 0.0, 1.0), InverseRange::Within};
    }
    if (family_ == "log") {
        double y = w_ / v - s_;
        return {std::clamp(y, 0.0, 1.0), InverseRange::Within};
    }

    // custom: the density is piecewise linear and strictly decreasing, so
    // locate the cell by binary search on the sample values and solve the
    // segment exactly.
    const size_t n = grid_.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (grid_[mid] >= v) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double slope = (grid_[hi] - grid_[lo]) / h;
    double y = static_cast<double>(lo) * h;
    if (slope != 0.0) y += (v - grid_[lo]) / slope;
    return {std::clamp(y, 0.0, 1.0), InverseRange::Within};
}

double PayoffFunction::max_density_slope() const {
    if (family_ == "quadratic") return c_;
    if (family_ == "log") return w_ / (s_ * s_); // |u'| = w/(y+s)^2, max at y = 0

    const size_t n = grid_.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    double m = 0.0;
    for (size_t k = 0; k + 1 < n; ++k) {
        m = std::max(m, std::abs(grid_[k + 1] - grid_[k]) / h);
    }
    return m;
}

double PayoffFunction::central_diff_bound() const {
    // Central differences of p err by |p'''| h^2 / 6 plus subtractive
    // cancellation of order eps/h; the floor keeps C h^2 above the
    // cancellation term down to h = 1e-4.
    const double floor = 1e-3;
    if (family_ == "quadratic") return floor; // p''' = 0
    if (family_ == "log") {
        // p''' = 2w/(y+s)^3, largest at y = 0; x4 safety.
        return std::max(floor, 2.0 * w_ / (s_ * s_ * s_) / 6.0 * 4.0);
    }
    // Piecewise-linear density: u' jumps between cells, second differences
    // of p are only O(h) accurate near breakpoints.
    return std::max(floor, 4.0 * max_density_slope());
}

PayoffProfile::PayoffProfile(std::vector<PayoffFunction> functions)
    : functions_(std::move(functions)) {
    if (functions_.empty()) throw ConfigError("payoff profile: empty function list");
}

double PayoffProfile::social_utility(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != size()) {
        throw ConfigError("social_utility: state has " + std::to_string(x.size()) +
                          " entries, expected " + std::to_string(size()));
    }
    double total = 0.0;
    for (int i = 0; i < size(); ++i) {
        const auto& f = functions_[i];
        total += f.cumulative(std::clamp(x[i], 0.0, 1.0)) - f.cumulative(0.0);
    }
    return total;
}

double PayoffProfile::max_density_slope() const {
    double m = 0.0;
    for (const auto& f : functions_) m = std::max(m, f.max_density_slope());
    return m;
}

double level_solve(const PayoffProfile& profile, const std::vector<int>& nodes, double mass) {
    if (nodes.empty()) throw ConfigError("level_solve: empty node set");
    if (!(mass >= 0.0) || mass > static_cast<double>(nodes.size()) + 1e-12) {
        throw NumericError("level_solve: mass " + std::to_string(mass) +
                           " outside [0, " + std::to_string(nodes.size()) + "]");
    }

    auto aggregate = [&](double eta) {
        double total = 0.0;
        for (int j : nodes) total += profile.inverse_density(j, eta).value;
        return total;
    };

    double lo = profile.density(nodes[0], 1.0); // aggregate here is |nodes| (max)
    double hi = profile.density(nodes[0], 0.0); // aggregate here is 0 (min)
    for (int j : nodes) {
        lo = std::min(lo, profile.density(j, 1.0));
        hi = std::max(hi, profile.density(j, 0.0));
    }

    // g is non-increasing in eta: keep g(lo) >= mass >= g(hi). On plateaus
    // every summand is pinned, so any root gives the same allocations; the
    // bisection lands on the plateau's interior.
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // double resolution reached
        if (aggregate(mid) >= mass) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    const double eta = 0.5 * (lo + hi);
    if (std::abs(aggregate(eta) - mass) > 1e-11) {
        throw NumericError("level_solve: residual " +
                           std::to_string(std::abs(aggregate(eta) - mass)) +
                           " exceeds 1e-11 (infeasible mass or conditioning)");
    }
    return eta;
}

} // namespace strataflow
