#pragma once

#include <string>
#include <vector>

namespace strataflow {

/// Where a requested density value landed relative to the range [u(1), u(0)].
enum class InverseRange { BelowRange, Within, AboveRange };

/// Result of inverting a payoff density, clamped to [0, 1].
/// below-range (v above u(0)) pins the value to 0; above-range (v below
/// u(1)) pins it to 1.
struct SaturatedInverse {
    double value = 0.0;
    InverseRange flag = InverseRange::Within;
};

/// One node's cumulative payoff p and strictly decreasing density u = p'.
///
/// Families:
///   quadratic {a, c>0}:  p(y) = -(c/2) y^2 - a y,  u(y) = -c y - a
///   log       {w>0,s>0}: p(y) = w ln(y + s),  u(y) = w / (y + s)
///   custom:   density sampled on a uniform grid over [0,1] (>= 101 points,
///             strictly decreasing); p by exact trapezoids, u by linear
///             interpolation.
/// The log family's p(0) = w ln(s) is nonzero; consumers only ever use
/// payoff differences, and social utility subtracts p(0) per node.
class PayoffFunction {
public:
    static PayoffFunction quadratic(double a, double c = 1.0);
    static PayoffFunction logarithmic(double w, double s);
    static PayoffFunction custom(std::vector<double> density_grid);

    /// p(y) on [0, 1]. Throws ConfigError outside the interval.
    double cumulative(double y) const;

    /// u(y) on [0, 1]; endpoints are the one-sided derivatives.
    double density(double y) const;

    /// Solves u(y) = v with clamping; |u(value) - v| <= 1e-12 when within.
    SaturatedInverse inverse_density(double v) const;

    /// sup over [0,1] of |u'|; Lipschitz modulus of the density.
    double max_density_slope() const;

    /// Bound B with |p(y+h) + p(y-h) - 2 p(y)| central-difference error
    /// against u below B h^2; drives the finite-difference property check.
    double central_diff_bound() const;

    /// Family tag: "quadratic", "log", or "custom".
    const std::string& family() const { return family_; }
    double param_a() const { return a_; }
    double param_c() const { return c_; }
    double param_w() const { return w_; }
    double param_s() const { return s_; }
    const std::vector<double>& density_grid() const { return grid_; }

private:
    PayoffFunction() = default;

    std::string family_;
    double a_ = 0.0, c_ = 1.0; // quadratic
    double w_ = 1.0, s_ = 1.0; // log
    std::vector<double> grid_;           // custom: density samples
    std::vector<double> grid_cumulative_; // custom: trapezoid prefix of p
};

/// Node-aligned list of payoff functions.
class PayoffProfile {
public:
    explicit PayoffProfile(std::vector<PayoffFunction> functions);

    int size() const { return static_cast<int>(functions_.size()); }
    const PayoffFunction& node(int i) const { return functions_[i]; }

    double cumulative(int i, double y) const { return functions_[i].cumulative(y); }
    double density(int i, double y) const { return functions_[i].density(y); }
    SaturatedInverse inverse_density(int i, double v) const {
        return functions_[i].inverse_density(v);
    }

    /// U(x) = sum_i [p_i(x_i) - p_i(0)].
    double social_utility(const std::vector<double>& x) const;

    /// Largest density Lipschitz modulus across nodes.
    double max_density_slope() const;

private:
    std::vector<PayoffFunction> functions_;
};

/// Solves sum_{j in nodes} u_j^{-1}(eta) = mass for eta by monotone
/// bisection over [min_j u_j(1), max_j u_j(0)], each term evaluated with
/// the clamped inverse. Residual at the returned level is <= 1e-11.
/// Throws NumericError when the mass is outside [0, |nodes|].
double level_solve(const PayoffProfile& profile, const std::vector<int>& nodes, double mass);

} // namespace strataflow
