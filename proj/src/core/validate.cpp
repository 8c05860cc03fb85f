#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <utility>

#include "analysis.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "integrator.hpp"
#include "nbrd.hpp"
#include "nrpm.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "ssd.hpp"

namespace strataflow {

namespace {

// ---------------------------------------------------------------------------
// Check bookkeeping
// ---------------------------------------------------------------------------

/// Tallies named checks; keeps the first failure's context per name so the
/// report stays readable even when one broken property fires thousands of
/// times.
class CheckTable {
public:
    using Detail = std::function<std::string()>;

    void record(const std::string& name, bool ok, const Detail& detail) {
        auto it = index_.find(name);
        if (it == index_.end()) {
            it = index_.emplace(name, rows_.size()).first;
            rows_.push_back({name, 0, 0, {}});
        }
        Row& row = rows_[it->second];
        if (ok) {
            ++row.passed;
            return;
        }
        ++row.failed;
        if (row.failed == 1) row.first_detail = detail();
    }

    long total_passed() const {
        long n = 0;
        for (const Row& r : rows_) n += r.passed;
        return n;
    }

    long total_failed() const {
        long n = 0;
        for (const Row& r : rows_) n += r.failed;
        return n;
    }

    std::string render() const {
        std::ostringstream out;
        for (const Row& r : rows_) {
            out << (r.failed ? "[FAIL] " : "[PASS] ") << r.name;
            for (std::size_t pad = r.name.size(); pad < 44; ++pad) out << ' ';
            out << ' ' << r.passed << " ok";
            if (r.failed) out << ", " << r.failed << " failed";
            out << '\n';
            if (r.failed && !r.first_detail.empty()) {
                out << "       first failure: " << r.first_detail << '\n';
            }
        }
        return out.str();
    }

private:
    struct Row {
        std::string name;
        long passed;
        long failed;
        std::string first_detail;
    };
    std::vector<Row> rows_;
    std::map<std::string, std::size_t> index_;
};

/// One randomized instance plus enough context to replay a failure.
struct CaseContext {
    std::uint64_t seed = 0;
    int index = 0;
    Topology topo;
    PayoffProfile profile;
    std::vector<double> x;

    std::string replay() const {
        Scenario scenario{topo, profile, SimulationConfig{}, x};
        scenario.seed = seed;
        std::ostringstream out;
        out << "seed=" << seed << " case=" << index
            << " replay scenario: " << scenario_to_json(scenario);
        return out.str();
    }

    CheckTable::Detail detail(const std::string& what) const {
        // Copy everything: the lambda outlives the loop iteration only on
        // failure, but must be safe regardless.
        CaseContext copy = *this;
        return [copy, what]() { return what + " | " + copy.replay(); };
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

// ---------------------------------------------------------------------------
// Quadrature helper
// ---------------------------------------------------------------------------

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double ssd_outflow_quadrature(const PayoffProfile& profile, const Topology& topo,
                              const std::vector<double>& x, int from, int to) {
    if (!topo.adjacent(from, to)) {
        throw ConfigError("ssd quadrature: nodes are not adjacent");
    }
    const double upper = std::clamp(x[static_cast<std::size_t>(from)], 0.0, 1.0);
    if (upper <= 0.0) return 0.0;
    const double target = profile.density(to, std::clamp(x[static_cast<std::size_t>(to)], 0.0, 1.0));
    auto gap = [&](double a) { return std::max(0.0, target - profile.density(from, a)); };
    const double fa = gap(0.0);
    const double fb = gap(upper);
    const double fm = gap(0.5 * upper);
    const double whole = upper / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(gap, 0.0, upper, fa, fm, fb, whole, 1e-12, 48);
}

namespace {

// ---------------------------------------------------------------------------
// Graph-layer checks
// ---------------------------------------------------------------------------

void check_graph(CheckTable& t, const CaseContext& c, SplitMix64& rng) {
    const int n = c.topo.node_count();

    // Incidence columns sum to zero: mass moved out equals mass moved in.
    FlowVector delta(static_cast<std::size_t>(c.topo.arc_count()));
    for (double& d : delta) d = rng.uniform();
    const std::vector<double> xdot = apply_incidence(c.topo, delta);
    double total = 0.0;
    for (double v : xdot) total += v;
    t.record("graph/incidence-mass-conserving", std::abs(total) <= 1e-12,
             c.detail("incidence column sum " + fmt(total)));

    // Random support pattern: decomposition partitions origins and
    // destinations, and every routing node lands among the origins.
    std::vector<Arc> pattern;
    for (const Arc& arc : c.topo.arcs()) {
        if (rng.uniform() < 0.3) pattern.push_back(arc);
    }
    for (int i = 0; i < n; ++i) {
        if (rng.uniform() < 0.3) pattern.push_back({i, i});
    }
    const OdDecomposition od = od_decompose(c.topo, pattern);

    std::vector<int> origin_hits(static_cast<std::size_t>(n), 0);
    std::vector<int> dest_hits(static_cast<std::size_t>(n), 0);
    for (const OdComponent& comp : od.components) {
        for (int i : comp.origins) ++origin_hits[static_cast<std::size_t>(i)];
        for (int i : comp.destinations) ++dest_hits[static_cast<std::size_t>(i)];
    }
    bool partitioned = true;
    for (int i = 0; i < n; ++i) {
        if (origin_hits[static_cast<std::size_t>(i)] > 1 ||
            dest_hits[static_cast<std::size_t>(i)] > 1) {
            partitioned = false;
        }
    }
    t.record("graph/od-partition", partitioned, c.detail("node in two components"));

    bool origins_cover = true;
    for (const Arc& arc : pattern) {
        bool found = false;
        for (const OdComponent& comp : od.components) {
            if (std::find(comp.origins.begin(), comp.origins.end(), arc.from) !=
                comp.origins.end()) {
                found = true;
                break;
            }
        }
        if (!found) origins_cover = false;
    }
    t.record("graph/od-origins-cover-routers", origins_cover,
             c.detail("routing node missing from every origin set"));
}

// ---------------------------------------------------------------------------
// Payoff-layer checks
// ---------------------------------------------------------------------------

void check_payoff(CheckTable& t, const CaseContext& c, SplitMix64& rng) {
    const int n = c.topo.node_count();

    bool decreasing = true;
    bool roundtrip = true;
    bool central = true;
    for (int i = 0; i < n; ++i) {
        for (int rep = 0; rep < 200; ++rep) {
            double y1 = rng.uniform();
            double y2 = rng.uniform();
            if (y1 == y2) continue;
            if (y1 > y2) std::swap(y1, y2);
            if (!(c.profile.density(i, y1) > c.profile.density(i, y2))) decreasing = false;
        }
        for (int rep = 0; rep < 50; ++rep) {
            const double y = rng.uniform();
            const SaturatedInverse inv = c.profile.inverse_density(i, c.profile.density(i, y));
            if (inv.flag != InverseRange::Within || std::abs(inv.value - y) > 1e-10) {
                roundtrip = false;
            }
        }
        const double bound = c.profile.node(i).central_diff_bound();
        for (double h : {1e-3, 1e-4}) {
            for (int rep = 0; rep < 10; ++rep) {
                const double y = h + (1.0 - 2.0 * h) * rng.uniform();
                const double diff = (c.profile.cumulative(i, y + h) -
                                     c.profile.cumulative(i, y - h)) / (2.0 * h);
                if (std::abs(diff - c.profile.density(i, y)) > bound * h * h) central = false;
            }
        }
    }
    t.record("payoff/density-strictly-decreasing", decreasing,
             c.detail("u(y1) <= u(y2) for y1 < y2"));
    t.record("payoff/inverse-density-roundtrip", roundtrip,
             c.detail("inverse(density(y)) drifted past 1e-10"));
    t.record("payoff/cumulative-derivative-consistent", central,
             c.detail("central difference of p disagrees with u"));

    // Common-level solve is monotone in the mass argument.
    {
        std::vector<int> nodes;
        for (int i = 0; i < n; ++i) {
            if (rng.uniform() < 0.6) nodes.push_back(i);
        }
        if (nodes.empty()) nodes.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
        const double span = static_cast<double>(nodes.size());
        const double m1 = rng.uniform(0.0, span - 0.1);
        const double m2 = m1 + rng.uniform(0.05, span - m1);
        const double eta1 = level_solve(c.profile, nodes, m1);
        const double eta2 = level_solve(c.profile, nodes, m2);
        t.record("payoff/level-solve-monotone", eta1 > eta2,
                 c.detail("eta(" + fmt(m1) + ") = " + fmt(eta1) + " !> eta(" + fmt(m2) +
                          ") = " + fmt(eta2)));
    }

    // Social utility is strictly concave on the simplex.
    {
        bool concave = true;
        for (int rep = 0; rep < 100; ++rep) {
            const std::vector<double> a = random_simplex(rng, n);
            const std::vector<double> b = random_simplex(rng, n);
            if (sup_diff(a, b) < 1e-3) continue; // too close to resolve strictness
            std::vector<double> mid(a.size());
            for (std::size_t k = 0; k < a.size(); ++k) mid[k] = 0.5 * (a[k] + b[k]);
            const double lhs = c.profile.social_utility(mid);
            const double rhs = 0.5 * c.profile.social_utility(a) +
                               0.5 * c.profile.social_utility(b);
            if (!(lhs > rhs)) concave = false;
        }
        t.record("payoff/social-utility-strictly-concave", concave,
                 c.detail("midpoint utility did not exceed the chord"));
    }
}

// ---------------------------------------------------------------------------
// Shared state sampling for the equilibrium biconditionals
// ---------------------------------------------------------------------------

/// States for the "zero field iff Nash" checks: the case's random state, the
/// exact waterfilling optimum, and boundary-safe perturbations of it. States
/// whose worst violation or component sizes sit inside the numerically
/// unresolvable band between "clearly at equilibrium" and "clearly moving"
/// are resampled: the biconditional is a statement about the exact sets, and
/// the band narrower than integrator noise cannot witness either side.
std::vector<std::vector<double>> equilibrium_probe_states(const CaseContext& c,
                                                          SplitMix64& rng,
                                                          const std::vector<double>& waterfill) {
    auto resolvable = [&](const std::vector<double>& s) {
        for (double v : s) {
            if (v > 1e-10 && v < 1e-4) return false;
        }
        const double worst = is_nash(c.profile, c.topo, s, 0.0).worst_violation;
        return worst <= 1e-9 || worst >= 1e-4;
    };

    std::vector<std::vector<double>> states;
    if (resolvable(c.x)) states.push_back(c.x);
    states.push_back(waterfill);

    const int n = c.topo.node_count();
    for (int want = 0; want < 2; ++want) {
        for (int attempt = 0; attempt < 6; ++attempt) {
            std::vector<double> p = waterfill;
            for (double& v : p) {
                v = std::max(0.0, v + 0.01 * (rng.uniform() - 0.5));
            }
            double total = 0.0;
            for (double v : p) total += v;
            if (total <= 0.0) continue;
            for (double& v : p) v /= total;
            if (static_cast<int>(p.size()) == n && resolvable(p)) {
                states.push_back(std::move(p));
                break;
            }
        }
    }
    return states;
}

// ---------------------------------------------------------------------------
// Dynamics checks
// ---------------------------------------------------------------------------

void check_ssd(CheckTable& t, const CaseContext& c, SplitMix64& rng,
               const std::vector<std::vector<double>>& probes) {
    const int n = c.topo.node_count();
    FlowVector delta;
    std::vector<double> xdot;

    // Order-respecting flow and acyclic support at a batch of random states.
    bool spc_ok = true;
    bool acyclic_ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        const std::vector<double> s = random_simplex(rng, n);
        ssd_field(c.profile, c.topo, s, delta, xdot);
        if (!check_spc(c.profile, c.topo, s, delta, 1e-12).satisfied) spc_ok = false;
        if (!support_flow_graph(c.topo, delta).acyclic) acyclic_ok = false;
    }
    t.record("ssd/strong-positive-correlation", spc_ok,
             c.detail("flow ran against the payoff order"));
    t.record("ssd/support-flow-acyclic", acyclic_ok,
             c.detail("support flow graph contains a cycle"));

    // Closed form against direct quadrature on random arcs.
    bool quad_ok = true;
    double worst_gap = 0.0;
    if (c.topo.arc_count() > 0) {
        for (int rep = 0; rep < 2; ++rep) {
            const Arc arc =
                c.topo.arcs()[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(c.topo.arc_count())))];
            const std::vector<double> s = random_simplex(rng, n);
            const double closed = ssd_outflow(c.profile, c.topo, s, arc.from, arc.to);
            const double quad = ssd_outflow_quadrature(c.profile, c.topo, s, arc.from, arc.to);
            worst_gap = std::max(worst_gap, std::abs(closed - quad));
            if (std::abs(closed - quad) > 1e-8) quad_ok = false;
        }
    }
    t.record("ssd/closed-form-matches-quadrature", quad_ok,
             c.detail("closed form vs quadrature gap " + fmt(worst_gap)));

    // Zero field exactly at Nash states and only there.
    bool equiv_ok = true;
    for (const auto& s : probes) {
        ssd_field(c.profile, c.topo, s, delta, xdot);
        double res = 0.0;
        for (double v : xdot) res = std::max(res, std::abs(v));
        const bool stationary = res <= 1e-10;
        const bool nash = is_nash(c.profile, c.topo, s, 1e-8).is_nash;
        if (stationary != nash) equiv_ok = false;
    }
    t.record("ssd/zero-field-iff-nash", equiv_ok,
             c.detail("stationarity and Nash membership disagree"));
}

void check_nbrd(CheckTable& t, const CaseContext& c, SplitMix64& rng,
                const std::vector<std::vector<double>>& probes) {
    const int n = c.topo.node_count();
    FlowVector delta;
    std::vector<double> xdot;

    bool spc_ok = true;
    bool acyclic_ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        const std::vector<double> s = random_simplex(rng, n);
        nbrd_field(c.profile, c.topo, s, delta, xdot);
        if (!check_spc(c.profile, c.topo, s, delta, 1e-12).satisfied) spc_ok = false;
        if (!support_flow_graph(c.topo, delta).acyclic) acyclic_ok = false;
    }
    t.record("nbrd/strong-positive-correlation", spc_ok,
             c.detail("flow ran against the payoff order"));
    t.record("nbrd/support-flow-acyclic", acyclic_ok,
             c.detail("support flow graph contains a cycle"));

    // Waterfilling against the exhaustive support oracle, plus the KKT
    // certificate, on two states per case.
    bool greedy_ok = true;
    bool kkt_ok = true;
    double worst_alloc_gap = 0.0;
    double worst_kkt = 0.0;
    const std::vector<double> second = random_simplex(rng, n);
    for (const std::vector<double>* s : {&c.x, &second}) {
        for (int i = 0; i < n; ++i) {
            const BestResponse fast = solve_node_best_response(c.profile, c.topo, *s, i);
            const BestResponse oracle = enumerate_supports_p2(c.profile, c.topo, *s, i);
            const double gap = sup_diff(fast.d, oracle.d);
            worst_alloc_gap = std::max(worst_alloc_gap, gap);
            if (gap > 1e-9) greedy_ok = false;
            const double kkt = verify_kkt_p2(c.profile, c.topo, *s, i, fast);
            worst_kkt = std::max(worst_kkt, kkt);
            if (kkt > 1e-8) kkt_ok = false;
        }
    }
    t.record("nbrd/waterfilling-matches-enumeration", greedy_ok,
             c.detail("allocation gap " + fmt(worst_alloc_gap)));
    t.record("nbrd/kkt-certificate", kkt_ok, c.detail("kkt residual " + fmt(worst_kkt)));

    // Strict concavity of the per-node program: projected gradient lands on
    // the waterfilling answer from any feasible start.
    {
        int node = 0;
        for (int i = 1; i < n; ++i) {
            if (c.x[static_cast<std::size_t>(i)] > c.x[static_cast<std::size_t>(node)]) node = i;
        }
        const BestResponse fast = solve_node_best_response(c.profile, c.topo, c.x, node);
        std::vector<int> hood{node};
        for (int j : c.topo.neighbors(node)) hood.push_back(j);
        bool unique_ok = true;
        double worst = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            const std::vector<double> weights = random_simplex(rng, static_cast<int>(hood.size()));
            std::vector<double> d0(static_cast<std::size_t>(n), 0.0);
            for (std::size_t k = 0; k < hood.size(); ++k) {
                d0[static_cast<std::size_t>(hood[k])] =
                    weights[k] * c.x[static_cast<std::size_t>(node)];
            }
            const BestResponse pg = p2_projected_gradient(c.profile, c.topo, c.x, node, d0);
            const double gap = sup_diff(pg.d, fast.d);
            worst = std::max(worst, gap);
            if (gap > 1e-7) unique_ok = false;
        }
        t.record("nbrd/optimizer-unique-across-starts", unique_ok,
                 c.detail("projected-gradient spread " + fmt(worst)));
    }

    bool equiv_ok = true;
    for (const auto& s : probes) {
        nbrd_field(c.profile, c.topo, s, delta, xdot);
        double res = 0.0;
        for (double v : xdot) res = std::max(res, std::abs(v));
        const bool stationary = res <= 1e-10;
        const bool nash = is_nash(c.profile, c.topo, s, 1e-8).is_nash;
        if (stationary != nash) equiv_ok = false;
    }
    t.record("nbrd/zero-field-iff-nash", equiv_ok,
             c.detail("stationarity and Nash membership disagree"));
}

void check_nrpm(CheckTable& t, const CaseContext& c, SplitMix64& rng,
                const std::vector<std::vector<double>>& probes) {
    const int n = c.topo.node_count();

    const Reallocation base = solve_p3(c.profile, c.topo, c.x);

    t.record("nrpm/reallocation-never-loses-utility",
             base.objective >= c.profile.social_utility(c.x) - 1e-12,
             c.detail("U(z) = " + fmt(base.objective) + " below U(x) = " +
                      fmt(c.profile.social_utility(c.x))));

    t.record("nrpm/kkt-certificate", base.kkt_residual <= 1e-8,
             c.detail("kkt residual " + fmt(base.kkt_residual)));

    // Used arcs route toward weakly better post-move densities.
    {
        bool ordered = true;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j || base.d[static_cast<std::size_t>(i * n + j)] <= 1e-7) continue;
                const double ui = c.profile.density(i, std::clamp(base.z[static_cast<std::size_t>(i)], 0.0, 1.0));
                const double uj = c.profile.density(j, std::clamp(base.z[static_cast<std::size_t>(j)], 0.0, 1.0));
                if (!(uj >= ui - 1e-6)) ordered = false;
            }
        }
        t.record("nrpm/used-arcs-respect-post-move-order", ordered,
                 c.detail("an occupied route points at a strictly worse node"));
    }

    t.record("nrpm/support-pattern-consistent",
             verify_support_pattern(c.profile, c.topo, c.x, base),
             c.detail("plan support pattern fails the closed-form cross-check"));

    // Post-move state is unique even though the plan is not.
    {
        bool unique_ok = true;
        double worst = 0.0;
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> warm(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < n; ++i) {
                std::vector<int> hood{i};
                for (int j : c.topo.neighbors(i)) hood.push_back(j);
                const std::vector<double> weights =
                    random_simplex(rng, static_cast<int>(hood.size()));
                for (std::size_t k = 0; k < hood.size(); ++k) {
                    warm[static_cast<std::size_t>(i * n + hood[k])] =
                        weights[k] * c.x[static_cast<std::size_t>(i)];
                }
            }
            const Reallocation again = solve_p3(c.profile, c.topo, c.x, &warm);
            const double gap = sup_diff(again.z, base.z);
            worst = std::max(worst, gap);
            if (gap > 1e-6) unique_ok = false;
        }
        t.record("nrpm/post-move-state-unique", unique_ok,
                 c.detail("z spread across warm starts " + fmt(worst)));
    }

    bool equiv_ok = true;
    FlowVector delta;
    std::vector<double> xdot;
    for (const auto& s : probes) {
        nrpm_field(c.profile, c.topo, s, delta, xdot);
        double res = 0.0;
        for (double v : xdot) res = std::max(res, std::abs(v));
        const bool stationary = res <= 1e-10;
        const bool nash = is_nash(c.profile, c.topo, s, 1e-8).is_nash;
        if (stationary != nash) equiv_ok = false;
    }
    t.record("nrpm/zero-field-iff-nash", equiv_ok,
             c.detail("stationarity and Nash membership disagree"));
}

// ---------------------------------------------------------------------------
// Trajectory checks
// ---------------------------------------------------------------------------

void check_trajectories(CheckTable& t, const CaseContext& c) {
    for (Dynamics kind : {Dynamics::Ssd, Dynamics::Nbrd, Dynamics::Nrpm}) {
        SimulationConfig config;
        config.dynamics = kind;
        config.t_max = 3.0;
        const Trajectory traj = simulate(c.profile, c.topo, c.x, config);
        const std::string tag = dynamics_name(kind);

        bool simplex_ok = true;
        bool monotone_ok = true;
        bool dissipation_ok = true;
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            double total = 0.0;
            double lowest = 1.0;
            for (double v : traj.states[k]) {
                total += v;
                lowest = std::min(lowest, v);
            }
            if (std::abs(total - 1.0) > 1e-9 || lowest < -1e-10) simplex_ok = false;
            if (k > 0 && traj.utilities[k] < traj.utilities[k - 1] - 1e-9) monotone_ok = false;
            if (kind != Dynamics::Nrpm && traj.dissipations[k] > 1e-12) dissipation_ok = false;
        }
        t.record("trajectory/" + tag + "-stays-on-simplex", simplex_ok,
                 c.detail("mass left the simplex"));
        t.record("trajectory/" + tag + "-utility-monotone", monotone_ok,
                 c.detail("utility dropped by more than 1e-9 in one step"));
        if (kind != Dynamics::Nrpm) {
            t.record("trajectory/" + tag + "-dissipation-nonpositive", dissipation_ok,
                     c.detail("positive dissipation recorded"));
        }
    }
}

// ---------------------------------------------------------------------------
// Analysis checks
// ---------------------------------------------------------------------------

void check_analysis(CheckTable& t, const CaseContext& c, SplitMix64& rng,
                    const Waterfill& wf) {
    t.record("analysis/waterfill-is-nash",
             is_nash(c.profile, c.topo, wf.x, 1e-10).is_nash,
             c.detail("global optimum rejected by the Nash check"));

    bool optimal = true;
    double worst = 0.0;
    const double best = c.profile.social_utility(wf.x);
    for (int rep = 0; rep < 200; ++rep) {
        const std::vector<double> s = random_simplex(rng, c.topo.node_count());
        const double gap = c.profile.social_utility(s) - best;
        worst = std::max(worst, gap);
        if (gap > 1e-12) optimal = false;
    }
    t.record("analysis/waterfill-dominates-samples", optimal,
             c.detail("sample beat the waterfill by " + fmt(worst)));
}

// ---------------------------------------------------------------------------
// Fixed reference instances
// ---------------------------------------------------------------------------

PayoffProfile quadratic_profile(const std::vector<double>& offsets) {
    std::vector<PayoffFunction> fs;
    fs.reserve(offsets.size());
    for (double a : offsets) fs.push_back(PayoffFunction::quadratic(a));
    return PayoffProfile(std::move(fs));
}

void check_fixed_instances(CheckTable& t) {
    auto fixed_detail = [](std::string what) {
        return [what = std::move(what)]() { return what; };
    };

    // Plan flow against the payoff order on the reference 3-path: the
    // centralized reallocation pushes mass from the richer end node toward
    // the middle, which pairwise order-respecting dynamics never do.
    {
        const Topology path = Topology::build(3, {{0, 1}, {1, 2}});
        const PayoffProfile profile = quadratic_profile({2.0, 2.0, 0.0});
        const std::vector<double> x{0.2, 0.8, 0.0};
        FlowVector delta;
        std::vector<double> xdot;
        nrpm_field(profile, path, x, delta, xdot);
        const SpcReport spc = check_spc(profile, path, x, delta, 1e-12);
        const bool has_arc_12 = std::find(spc.violations.begin(), spc.violations.end(),
                                          Arc{0, 1}) != spc.violations.end();
        t.record("fixed/nrpm-breaks-positive-correlation", !spc.satisfied && has_arc_12,
                 fixed_detail("expected a violation on arc 1->2 of the 3-path"));

        const Reallocation plan = solve_p3(profile, path, x);
        const std::vector<double> expected{0.1, 0.1, 0.8};
        t.record("fixed/nrpm-path-counterexample-state",
                 sup_diff(plan.z, expected) <= 1e-6,
                 fixed_detail("z = [" + fmt(plan.z[0]) + ", " + fmt(plan.z[1]) + ", " +
                              fmt(plan.z[2]) + "] expected [0.1, 0.1, 0.8]"));
    }

    // Adding the closing edge shrinks the Nash set: the triangle's single
    // Nash point still passes on the path, while the path's continuum
    // mostly fails on the triangle.
    {
        const Topology path = Topology::build(3, {{0, 1}, {1, 2}});
        const Topology triangle = Topology::build(3, {{0, 1}, {0, 2}, {1, 2}});
        const PayoffProfile profile = quadratic_profile({0.0, 5.0, 0.0});

        bool ok = is_nash(profile, path, {0.5, 0.0, 0.5}, 1e-10).is_nash &&
                  is_nash(profile, triangle, {0.5, 0.0, 0.5}, 1e-10).is_nash;
        int rejected = 0;
        for (double sigma : {0.0, 0.25, 0.75, 1.0}) {
            const std::vector<double> s{sigma, 0.0, 1.0 - sigma};
            if (!is_nash(profile, path, s, 1e-10).is_nash) ok = false;
            if (!is_nash(profile, triangle, s, 1e-10).is_nash) ++rejected;
        }
        t.record("fixed/nash-set-shrinks-with-edges", ok && rejected == 4,
                 fixed_detail("triangle Nash set is not a strict subset of the path's"));
    }

    // Full convergence runs on the reference 3-path: every dynamics reaches
    // a Nash point from the same interior start.
    {
        const Topology path = Topology::build(3, {{0, 1}, {1, 2}});
        const PayoffProfile profile = quadratic_profile({0.0, 5.0, 0.0});
        const std::vector<double> x0{0.2, 0.5, 0.3};
        for (Dynamics kind : {Dynamics::Ssd, Dynamics::Nbrd, Dynamics::Nrpm}) {
            SimulationConfig config;
            config.dynamics = kind;
            config.tol_eq = 1e-10;
            const Trajectory traj = simulate(profile, path, x0, config);
            const bool nash = is_nash(profile, path, traj.final_state, 1e-6).is_nash;
            t.record("fixed/" + dynamics_name(kind) + "-converges-to-nash",
                     traj.converged && nash,
                     fixed_detail("converged=" + std::string(traj.converged ? "yes" : "no") +
                                  " t_final=" + fmt(traj.t_final)));
        }
    }
}

} // namespace

ValidationResult run_validation(std::uint64_t seed, int cases) {
    if (cases < 1) throw ConfigError("validate: cases must be at least 1");

    CheckTable table;
    check_fixed_instances(table);

    for (int k = 0; k < cases; ++k) {
        SplitMix64 rng = case_rng(seed, static_cast<std::uint64_t>(k));
        const int n = 3 + static_cast<int>(rng.below(4));

        // Braced-list element order fixes the draw order.
        CaseContext c{seed, k, random_connected_topology(rng, n), random_profile(rng, n),
                      random_simplex(rng, n)};

        const Waterfill wf = global_waterfill(c.profile);
        const std::vector<std::vector<double>> probes = equilibrium_probe_states(c, rng, wf.x);

        check_graph(table, c, rng);
        check_payoff(table, c, rng);
        check_ssd(table, c, rng, probes);
        check_nbrd(table, c, rng, probes);
        check_nrpm(table, c, rng, probes);
        check_trajectories(table, c);
        check_analysis(table, c, rng, wf);
    }

    ValidationResult result;
    result.checks_passed = table.total_passed();
    result.checks_failed = table.total_failed();
    result.passed = result.checks_failed == 0;

    std::ostringstream out;
    out << table.render();
    out << (result.passed ? "all " : "FAILED: ") << result.checks_passed << " checks passed";
    if (result.checks_failed > 0) out << ", " << result.checks_failed << " failed";
    out << " (seed " << seed << ", " << cases << " cases)\n";
    result.report = out.str();
    return result;
}

} // namespace strataflow
