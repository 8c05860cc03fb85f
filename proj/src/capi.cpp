#include "strataflow.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "core/analysis.hpp"
#include "core/errors.hpp"
#include "core/field.hpp"
#include "core/graph.hpp"
#include "core/integrator.hpp"
#include "core/nbrd.hpp"
#include "core/nrpm.hpp"
#include "core/scenario.hpp"
#include "core/validate.hpp"

using namespace strataflow;

struct sf_scenario {
    Scenario impl;
};

struct sf_sim {
    // The stepper keeps references into the snapshot, so the snapshot must
    // be declared (and therefore constructed) first.
    Scenario snapshot;
    Stepper stepper;

    explicit sf_sim(Scenario s)
        : snapshot(std::move(s)),
          stepper(snapshot.profile, snapshot.topology, snapshot.x0, snapshot.config) {}
};

namespace {

thread_local std::string t_last_error;

sf_status fail(sf_status code, const char* what) {
    t_last_error = what;
    return code;
}

/// Runs `body`, translating exceptions to status codes.
template <typename Body>
sf_status guarded(Body&& body) {
    try {
        t_last_error.clear();
        return body();
    } catch (const ConfigError& e) {
        return fail(SF_ERR_CONFIG, e.what());
    } catch (const ConvergenceError& e) {
        return fail(SF_ERR_NO_CONVERGENCE, e.what());
    } catch (const NumericError& e) {
        return fail(SF_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(SF_ERR_NUMERIC, e.what());
    } catch (...) {
        return fail(SF_ERR_NUMERIC, "unknown failure");
    }
}

sf_status require(bool ok, const char* what) {
    return ok ? SF_OK : fail(SF_ERR_CONFIG, what);
}

std::vector<double> read_state(const sf_scenario* s, const double* x) {
    const auto n = static_cast<std::size_t>(s->impl.topology.node_count());
    std::vector<double> state(x, x + n);
    require_simplex(state);
    return state;
}

} // namespace

const char* sf_last_error(void) { return t_last_error.c_str(); }

// ---------------------------------------------------------------------------
// Scenario lifecycle
// ---------------------------------------------------------------------------

sf_status sf_scenario_load(const char* path, sf_scenario** out) {
    if (const sf_status bad = require(path && out, "null argument")) return bad;
    return guarded([&] {
        *out = new sf_scenario{load_scenario_file(path)};
        return SF_OK;
    });
}

sf_status sf_scenario_parse(const char* json_text, sf_scenario** out) {
    if (const sf_status bad = require(json_text && out, "null argument")) return bad;
    return guarded([&] {
        *out = new sf_scenario{parse_scenario(json_text)};
        return SF_OK;
    });
}

void sf_scenario_free(sf_scenario* s) { delete s; }

int sf_scenario_nodes(const sf_scenario* s) {
    return s ? s->impl.topology.node_count() : 0;
}

const char* sf_scenario_dynamics(const sf_scenario* s) {
    if (!s) return "";
    switch (s->impl.config.dynamics) {
        case Dynamics::Ssd: return "ssd";
        case Dynamics::Nbrd: return "nbrd";
        case Dynamics::Nrpm: return "nrpm";
    }
    return "";
}

sf_status sf_scenario_initial_state(const sf_scenario* s, double* x_out) {
    if (const sf_status bad = require(s && x_out, "null argument")) return bad;
    std::copy(s->impl.x0.begin(), s->impl.x0.end(), x_out);
    return SF_OK;
}

const char* sf_scenario_trajectory_path(const sf_scenario* s) {
    return s ? s->impl.trajectory_csv.c_str() : "";
}

const char* sf_scenario_summary_path(const sf_scenario* s) {
    return s ? s->impl.summary_json.c_str() : "";
}

uint64_t sf_scenario_seed(const sf_scenario* s) { return s ? s->impl.seed : 0; }

// ---------------------------------------------------------------------------
// Pointwise analysis
// ---------------------------------------------------------------------------

sf_status sf_social_utility(const sf_scenario* s, const double* x, double* u_out) {
    if (const sf_status bad = require(s && x && u_out, "null argument")) return bad;
    return guarded([&] {
        *u_out = s->impl.profile.social_utility(read_state(s, x));
        return SF_OK;
    });
}

sf_status sf_check_nash(const sf_scenario* s, const double* x, double tol,
                        int* is_nash_out, double* worst_violation_out, int* support_out) {
    if (const sf_status bad = require(s && x && is_nash_out && worst_violation_out,
                                      "null argument")) {
        return bad;
    }
    return guarded([&] {
        const NashReport report = is_nash(s->impl.profile, s->impl.topology,
                                          read_state(s, x), tol);
        *is_nash_out = report.is_nash ? 1 : 0;
        *worst_violation_out = report.worst_violation;
        if (support_out) {
            const int n = s->impl.topology.node_count();
            std::fill(support_out, support_out + n, 0);
            for (int i : report.support) support_out[i] = 1;
        }
        return SF_OK;
    });
}

sf_status sf_global_waterfill(const sf_scenario* s, double* x_out, double* level_out) {
    if (const sf_status bad = require(s && x_out, "null argument")) return bad;
    return guarded([&] {
        const Waterfill wf = global_waterfill(s->impl.profile);
        std::copy(wf.x.begin(), wf.x.end(), x_out);
        if (level_out) *level_out = wf.level;
        return SF_OK;
    });
}

sf_status sf_equilibrium_residual(const sf_scenario* s, const double* x,
                                  double* residual_out) {
    if (const sf_status bad = require(s && x && residual_out, "null argument")) return bad;
    return guarded([&] {
        *residual_out = equilibrium_residual(s->impl.profile, s->impl.topology,
                                             read_state(s, x), s->impl.config.dynamics);
        return SF_OK;
    });
}

sf_status sf_best_response(const sf_scenario* s, const double* x, int node,
                           double* d_out, double* eta_out, int* eta_defined_out) {
    if (const sf_status bad = require(s && x && d_out && eta_out, "null argument")) return bad;
    if (const sf_status bad = require(node >= 0 && node < sf_scenario_nodes(s),
                                      "node index out of range")) {
        return bad;
    }
    return guarded([&] {
        const BestResponse br = solve_node_best_response(s->impl.profile, s->impl.topology,
                                                         read_state(s, x), node);
        std::copy(br.d.begin(), br.d.end(), d_out);
        *eta_out = br.eta;
        if (eta_defined_out) *eta_defined_out = br.eta_defined ? 1 : 0;
        return SF_OK;
    });
}

sf_status sf_nrpm_solve(const sf_scenario* s, const double* x, double* z_out,
                        double* d_out, double* kkt_out) {
    if (const sf_status bad = require(s && x && z_out, "null argument")) return bad;
    return guarded([&] {
        const Reallocation plan = solve_p3(s->impl.profile, s->impl.topology,
                                           read_state(s, x));
        std::copy(plan.z.begin(), plan.z.end(), z_out);
        if (d_out) std::copy(plan.d.begin(), plan.d.end(), d_out);
        if (kkt_out) *kkt_out = plan.kkt_residual;
        return SF_OK;
    });
}

sf_status sf_nrpm_components(const sf_scenario* s, const double* x,
                             int* origin_comp_out, int* dest_comp_out,
                             int* n_components_out) {
    if (const sf_status bad = require(s && x && origin_comp_out && dest_comp_out &&
                                      n_components_out, "null argument")) {
        return bad;
    }
    return guarded([&] {
        const int n = s->impl.topology.node_count();
        const Reallocation plan = solve_p3(s->impl.profile, s->impl.topology,
                                           read_state(s, x));
        std::vector<Arc> pattern;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (plan.d[static_cast<std::size_t>(i * n + j)] > 1e-9) {
                    pattern.push_back({i, j});
                }
            }
        }
        const OdDecomposition od = od_decompose(s->impl.topology, pattern);
        std::fill(origin_comp_out, origin_comp_out + n, -1);
        std::fill(dest_comp_out, dest_comp_out + n, -1);
        for (std::size_t r = 0; r < od.components.size(); ++r) {
            for (int i : od.components[r].origins) origin_comp_out[i] = static_cast<int>(r);
            for (int i : od.components[r].destinations) dest_comp_out[i] = static_cast<int>(r);
        }
        *n_components_out = static_cast<int>(od.components.size());
        return SF_OK;
    });
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

sf_status sf_sim_create(const sf_scenario* s, sf_sim** out) {
    if (const sf_status bad = require(s && out, "null argument")) return bad;
    return guarded([&] {
        *out = new sf_sim(s->impl);
        return SF_OK;
    });
}

void sf_sim_free(sf_sim* sim) { delete sim; }

sf_status sf_sim_step(sf_sim* sim) {
    if (const sf_status bad = require(sim != nullptr, "null argument")) return bad;
    return guarded([&] {
        sim->stepper.advance();
        return SF_OK;
    });
}

int sf_sim_done(const sf_sim* sim) { return sim && sim->stepper.done() ? 1 : 0; }

int sf_sim_converged(const sf_sim* sim) { return sim && sim->stepper.converged() ? 1 : 0; }

double sf_sim_time(const sf_sim* sim) { return sim ? sim->stepper.time() : 0.0; }

sf_status sf_sim_state(const sf_sim* sim, double* x_out) {
    if (const sf_status bad = require(sim && x_out, "null argument")) return bad;
    const std::vector<double>& x = sim->stepper.state();
    std::copy(x.begin(), x.end(), x_out);
    return SF_OK;
}

double sf_sim_utility(const sf_sim* sim) { return sim ? sim->stepper.utility() : 0.0; }

double sf_sim_residual(const sf_sim* sim) { return sim ? sim->stepper.residual() : 0.0; }

double sf_sim_dissipation(const sf_sim* sim) {
    return sim ? sim->stepper.dissipation_rate() : 0.0;
}

// ---------------------------------------------------------------------------
// Property suite
// ---------------------------------------------------------------------------

sf_status sf_validate(uint64_t seed, int cases, char** report_out) {
    if (const sf_status bad = require(report_out != nullptr, "null argument")) return bad;
    *report_out = nullptr;
    return guarded([&] {
        const ValidationResult result = run_validation(seed, cases);
        char* text = new char[result.report.size() + 1];
        std::memcpy(text, result.report.c_str(), result.report.size() + 1);
        *report_out = text;
        if (result.passed) return SF_OK;
        return fail(SF_ERR_VALIDATION, "model validation found failing properties");
    });
}

void sf_string_free(char* text) { delete[] text; }
