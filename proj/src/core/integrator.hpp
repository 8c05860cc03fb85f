#pragma once

#include <vector>

#include "field.hpp"
#include "graph.hpp"
#include "payoff.hpp"

namespace strataflow {

/// Fixed-step integration settings.
struct SimulationConfig {
    Dynamics dynamics = Dynamics::Ssd;
    double h = 0.01;          // step size
    double t_max = 200.0;     // time horizon
    double tol_eq = 1e-8;     // convergence threshold on the velocity sup norm
    double clamp_tol = 1e-10; // largest tolerated negative component per step

    void validate() const; // throws ConfigError
};

/// Recorded run: one row per step (including the start state).
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> utilities;
    std::vector<double> residuals;
    std::vector<double> dissipations;
    bool converged = false;
    double t_final = 0.0;
    std::vector<double> final_state;
};

/// Descent rate of the negated utility: sum over arcs of
/// delta_ij (u_i(x_i) - u_j(x_j)). Nonpositive whenever the flow respects
/// payoff order.
double dissipation(const PayoffProfile& profile, const Topology& topo,
                   const std::vector<double>& x, const FlowVector& delta);

/// Incremental simulation driver. Each advance() performs one RK4 step,
/// clamps round-off negatives, renormalizes the mass, and refreshes the
/// metrics; the field value is shared between the convergence check and
/// the next step's first stage.
class Stepper {
public:
    Stepper(const PayoffProfile& profile, const Topology& topo, const std::vector<double>& x0,
            const SimulationConfig& config);

    bool done() const { return converged_ || time_ >= config_.t_max - 0.5 * config_.h; }
    bool converged() const { return converged_; }
    double time() const { return time_; }
    const std::vector<double>& state() const { return x_; }
    double utility() const { return utility_; }
    double residual() const { return residual_; }
    double dissipation_rate() const { return dissipation_; }

    /// One RK4 step. Throws NumericError when a component falls below the
    /// clamp tolerance or the pre-rescale mass drifts.
    void advance();

private:
    void refresh_metrics();

    const PayoffProfile& profile_;
    const Topology& topo_;
    SimulationConfig config_;
    std::vector<double> x_;
    std::vector<double> warm_d_; // reallocation-plan warm start
    FieldEval field_;            // field at the current state (= next k1)
    double time_ = 0.0;
    double utility_ = 0.0;
    double residual_ = 0.0;
    double dissipation_ = 0.0;
    bool converged_ = false;
};

/// Runs the stepper to convergence or the horizon, recording every step.
Trajectory simulate(const PayoffProfile& profile, const Topology& topo,
                    const std::vector<double>& x0, const SimulationConfig& config);

/// Validates that x is a population state: nonnegative up to debris and
/// summing to one within 1e-9. Throws ConfigError otherwise.
void require_simplex(const std::vector<double>& x);

} // namespace strataflow
