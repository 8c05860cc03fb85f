#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace strataflow {

void SimulationConfig::validate() const {
    if (!(h > 0.0)) throw ConfigError("integrator.h must be positive");
    if (!(t_max >= h)) throw ConfigError("integrator.t_max must be at least one step");
    if (!(tol_eq > 0.0)) throw ConfigError("integrator.tol_eq must be positive");
    if (!(clamp_tol > 0.0)) throw ConfigError("integrator.clamp_tol must be positive");
}

void require_simplex(const std::vector<double>& x) {
    double total = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] < -1e-12) {
            throw ConfigError("state: component " + std::to_string(i + 1) + " is negative (" +
                              std::to_string(x[i]) + ")");
        }
        total += x[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("state: components sum to " + std::to_string(total) +
                          ", expected 1 within 1e-9");
    }
}

double dissipation(const PayoffProfile& profile, const Topology& topo,
                   const std::vector<double>& x, const FlowVector& delta) {
    if (static_cast<int>(delta.size()) != topo.arc_count()) {
        throw ConfigError("dissipation: flow vector length mismatch");
    }
    double total = 0.0;
    const auto& arcs = topo.arcs();
    for (int m = 0; m < static_cast<int>(arcs.size()); ++m) {
        const double ui = profile.density(arcs[m].from, std::clamp(x[arcs[m].from], 0.0, 1.0));
        const double uj = profile.density(arcs[m].to, std::clamp(x[arcs[m].to], 0.0, 1.0));
        total += delta[m] * (ui - uj);
    }
    return total;
}

Stepper::Stepper(const PayoffProfile& profile, const Topology& topo,
                 const std::vector<double>& x0, const SimulationConfig& config)
    : profile_(profile), topo_(topo), config_(config), x_(x0) {
    config_.validate();
    require_simplex(x_);
    if (static_cast<int>(x_.size()) != topo_.node_count()) {
        throw ConfigError("state length does not match the node count");
    }
    // Normalize away any tolerated sub-1e-9 drift in the input.
    double total = 0.0;
    for (double& v : x_) {
        v = std::max(v, 0.0);
        total += v;
    }
    for (double& v : x_) v /= total;

    field_ = eval_field(profile_, topo_, config_.dynamics, x_, &warm_d_);
    refresh_metrics();
}

void Stepper::refresh_metrics() {
    utility_ = profile_.social_utility(x_);
    residual_ = 0.0;
    for (double v : field_.xdot) residual_ = std::max(residual_, std::abs(v));
    dissipation_ = dissipation(profile_, topo_, x_, field_.delta);
    converged_ = residual_ < config_.tol_eq;
}

void Stepper::advance() {
    const int n = topo_.node_count();
    const double h = config_.h;

    // Classical four-stage step; the first stage reuses the field already
    // evaluated for the convergence check.
    const std::vector<double>& k1 = field_.xdot;
    std::vector<double> stage(n);

    for (int i = 0; i < n; ++i) stage[i] = x_[i] + 0.5 * h * k1[i];
    const std::vector<double> k2 =
        eval_field(profile_, topo_, config_.dynamics, stage, &warm_d_).xdot;

    for (int i = 0; i < n; ++i) stage[i] = x_[i] + 0.5 * h * k2[i];
    const std::vector<double> k3 =
        eval_field(profile_, topo_, config_.dynamics, stage, &warm_d_).xdot;

    for (int i = 0; i < n; ++i) stage[i] = x_[i] + h * k3[i];
    const std::vector<double> k4 =
        eval_field(profile_, topo_, config_.dynamics, stage, &warm_d_).xdot;

    std::vector<double> next(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        next[i] = x_[i] + h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        total += next[i];
    }

    // The field sums to zero analytically; anything beyond accumulation
    // noise signals a broken flow balance.
    if (std::abs(total - 1.0) > 1e-12 * h + 1e-15) {
        throw NumericError("rk4: pre-rescale mass drift " + std::to_string(total - 1.0) +
                           " at t = " + std::to_string(time_));
    }

    double clamped_total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (next[i] < 0.0) {
            if (next[i] < -config_.clamp_tol) {
                throw NumericError("rk4: component " + std::to_string(i + 1) + " fell to " +
                                   std::to_string(next[i]) + " at t = " +
                                   std::to_string(time_ + h) + "; reduce the step size");
            }
            next[i] = 0.0;
        }
        clamped_total += next[i];
    }
    for (int i = 0; i < n; ++i) next[i] /= clamped_total;

    x_ = std::move(next);
    time_ += h;
    field_ = eval_field(profile_, topo_, config_.dynamics, x_, &warm_d_);
    refresh_metrics();
}

Trajectory simulate(const PayoffProfile& profile, const Topology& topo,
                    const std::vector<double>& x0, const SimulationConfig& config) {
    Stepper stepper(profile, topo, x0, config);

    Trajectory traj;
    auto record = [&]() {
        traj.times.push_back(stepper.time());
        traj.states.push_back(stepper.state());
        traj.utilities.push_back(stepper.utility());
        traj.residuals.push_back(stepper.residual());
        traj.dissipations.push_back(stepper.dissipation_rate());
    };

    record();
    while (!stepper.done()) {
        stepper.advance();
        record();
    }

    traj.converged = stepper.converged();
    traj.t_final = stepper.time();
    traj.final_state = stepper.state();
    return traj;
}

} // namespace strataflow
