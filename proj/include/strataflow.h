/* strataflow — stratified population dynamics on networks.
 *
 * C boundary of the simulation library. All functions return sf_status;
 * outputs are written through caller-provided buffers sized from
 * sf_scenario_nodes(). State vectors are 0-based and node-aligned.
 * Handles are opaque; every create has a matching free. Thread safety:
 * distinct handles may be used concurrently, one handle must not be
 * shared between threads without external synchronization. Error text
 * for the most recent failing call is kept per thread.
 */
#ifndef STRATAFLOW_H
#define STRATAFLOW_H

#include <stdint.h>

#if defined(_WIN32)
#define SF_API __declspec(dllexport)
#else
#define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Nonzero values double as process exit codes. */
typedef enum sf_status {
    SF_OK = 0,
    SF_ERR_CONFIG = 1,         /* bad input: file, schema, argument */
    SF_ERR_NUMERIC = 2,        /* numerical failure inside a solver or step */
    SF_ERR_NO_CONVERGENCE = 3, /* iteration budget exhausted */
    SF_ERR_VALIDATION = 4      /* property suite found a failure */
} sf_status;

typedef struct sf_scenario sf_scenario;
typedef struct sf_sim sf_sim;

/* Message of the calling thread's most recent failure ("" when none).
 * The pointer stays valid until the thread's next library call. */
SF_API const char* sf_last_error(void);

/* --------------------------------------------------------------------
 * Scenario lifecycle
 * ------------------------------------------------------------------ */

SF_API sf_status sf_scenario_load(const char* path, sf_scenario** out);
SF_API sf_status sf_scenario_parse(const char* json_text, sf_scenario** out);
SF_API void sf_scenario_free(sf_scenario* s);

SF_API int sf_scenario_nodes(const sf_scenario* s);
/* "ssd" | "nbrd" | "nrpm" */
SF_API const char* sf_scenario_dynamics(const sf_scenario* s);
SF_API sf_status sf_scenario_initial_state(const sf_scenario* s, double* x_out);
SF_API const char* sf_scenario_trajectory_path(const sf_scenario* s);
SF_API const char* sf_scenario_summary_path(const sf_scenario* s);
SF_API uint64_t sf_scenario_seed(const sf_scenario* s);

/* --------------------------------------------------------------------
 * Pointwise analysis. x is a population state of length
 * sf_scenario_nodes(); it must be nonnegative and sum to 1 within 1e-9.
 * ------------------------------------------------------------------ */

SF_API sf_status sf_social_utility(const sf_scenario* s, const double* x, double* u_out);

/* support_out (length nodes, may be NULL) receives 0/1 occupancy flags. */
SF_API sf_status sf_check_nash(const sf_scenario* s, const double* x, double tol,
                               int* is_nash_out, double* worst_violation_out,
                               int* support_out);

/* Graph-independent social-utility maximizer; level_out may be NULL. */
SF_API sf_status sf_global_waterfill(const sf_scenario* s, double* x_out,
                                     double* level_out);

/* Sup norm of the scenario dynamics' velocity at x. */
SF_API sf_status sf_equilibrium_residual(const sf_scenario* s, const double* x,
                                         double* residual_out);

/* Optimal reallocation of one node's mass over its closed neighborhood.
 * node is 0-based; d_out has length nodes (zero off the neighborhood).
 * eta is undefined for an empty node; *eta_defined_out tells which. */
SF_API sf_status sf_best_response(const sf_scenario* s, const double* x, int node,
                                  double* d_out, double* eta_out, int* eta_defined_out);

/* Network-wide one-hop reallocation. z_out has length nodes; d_out, when
 * non-NULL, has length nodes*nodes row-major with self entries on the
 * diagonal; kkt_out may be NULL. */
SF_API sf_status sf_nrpm_solve(const sf_scenario* s, const double* x, double* z_out,
                               double* d_out, double* kkt_out);

/* Origin/destination components of the solved plan's support pattern.
 * origin_comp_out[i] is the component index node i originates in (-1 if
 * none); dest_comp_out[i] likewise as a destination. Both have length
 * nodes; n_components_out receives the component count. */
SF_API sf_status sf_nrpm_components(const sf_scenario* s, const double* x,
                                    int* origin_comp_out, int* dest_comp_out,
                                    int* n_components_out);

/* --------------------------------------------------------------------
 * Simulation. The sim snapshots the scenario at creation; the scenario
 * handle may be freed independently afterwards.
 * ------------------------------------------------------------------ */

SF_API sf_status sf_sim_create(const sf_scenario* s, sf_sim** out);
SF_API void sf_sim_free(sf_sim* sim);

/* One fixed-size integration step. */
SF_API sf_status sf_sim_step(sf_sim* sim);
SF_API int sf_sim_done(const sf_sim* sim);
SF_API int sf_sim_converged(const sf_sim* sim);
SF_API double sf_sim_time(const sf_sim* sim);
SF_API sf_status sf_sim_state(const sf_sim* sim, double* x_out);
SF_API double sf_sim_utility(const sf_sim* sim);
SF_API double sf_sim_residual(const sf_sim* sim);
SF_API double sf_sim_dissipation(const sf_sim* sim);

/* --------------------------------------------------------------------
 * Property suite
 * ------------------------------------------------------------------ */

/* Runs the randomized model validation. *report_out receives the
 * pass/fail table (free with sf_string_free); returns SF_OK when every
 * check passed, SF_ERR_VALIDATION otherwise. */
SF_API sf_status sf_validate(uint64_t seed, int cases, char** report_out);
SF_API void sf_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* STRATAFLOW_H */
