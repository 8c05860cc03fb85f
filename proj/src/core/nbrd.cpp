#include "nbrd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "errors.hpp"

namespace strataflow {

namespace {

// Closed neighborhood of i, self first, then sorted neighbors.
std::vector<int> closed_neighborhood(const Topology& topo, int i) {
    std::vector<int> out;
    out.reserve(topo.neighbors(i).size() + 1);
    out.push_back(i);
    for (int j : topo.neighbors(i)) out.push_back(j);
    return out;
}

// Entry level: the density a candidate offers to the first arriving mass.
double entry_level(const PayoffProfile& profile, const std::vector<double>& x, int i, int j) {
    if (j == i) return profile.density(i, 0.0);
    return profile.density(j, std::clamp(x[j], 0.0, 1.0));
}

// Post-move objective of node i's program: receiving nodes are refilled to
// their allocation targets, everything else in the closed neighborhood
// stays at its current cumulative payoff.
double p2_objective(const PayoffProfile& profile, const std::vector<double>& x, int i,
                    const std::vector<int>& hood, const std::vector<double>& d) {
    double total = 0.0;
    for (int j : hood) {
        const double xj = (j == i) ? 0.0 : std::clamp(x[j], 0.0, 1.0);
        total += profile.cumulative(j, std::clamp(xj + d[j], 0.0, 1.0));
    }
    return total;
}

BestResponse empty_response(int i, int n) {
    BestResponse br;
    br.node = i;
    br.d.assign(n, 0.0);
    return br;
}

} // namespace

BestResponse solve_node_best_response(const PayoffProfile& profile, const Topology& topo,
                                      const std::vector<double>& x, int i) {
    const int n = topo.node_count();
    const double xi = std::clamp(x[i], 0.0, 1.0);
    if (xi <= 0.0) return empty_response(i, n);

    // Candidates sorted by entry level descending, index ascending on ties.
    std::vector<int> order = closed_neighborhood(topo, i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ea = entry_level(profile, x, i, a);
        const double eb = entry_level(profile, x, i, b);
        return ea != eb ? ea > eb : a < b;
    });

    // The mover's own mass pours in regardless of whether the node keeps
    // any of it; receiving neighbors contribute the mass already on them.
    std::vector<int> support;
    double mass = xi;
    double eta = 0.0;
    for (size_t k = 0; k < order.size(); ++k) {
        const int j = order[k];
        const double entry = entry_level(profile, x, i, j);
        if (k > 0 && entry <= eta) break; // next entry at or under water: stop
        support.push_back(j);
        if (j != i) mass += std::clamp(x[j], 0.0, 1.0);
        eta = level_solve(profile, support, mass);
    }

    BestResponse br = empty_response(i, n);
    br.eta = eta;
    br.eta_defined = true;
    for (int j : support) {
        const double target = profile.inverse_density(j, eta).value;
        const double existing = (j == i) ? 0.0 : std::clamp(x[j], 0.0, 1.0);
        br.d[j] = std::max(0.0, target - existing);
    }

    // The waterfilling identity makes the allocations sum to x_i up to the
    // level-solve residual; rescale that residual away so downstream
    // feasibility checks see clean mass balance. A larger discrepancy can
    // only come from a broken solve, so refuse to paper over it.
    double total = 0.0;
    for (int j : support) total += br.d[j];
    if (std::abs(total - xi) > 1e-8 * (1.0 + xi)) {
        throw NumericError("solve_node_best_response: allocations for node " +
                           std::to_string(i + 1) + " sum to " + std::to_string(total) +
                           ", expected " + std::to_string(xi));
    }
    if (total > 0.0) {
        const double scale = xi / total;
        for (int j : support) br.d[j] *= scale;
    } else {
        br.d[i] = xi; // vanishing mass: keep it in place
        support.assign(1, i);
    }

    std::sort(support.begin(), support.end());
    br.support = std::move(support);
    return br;
}

double verify_kkt_p2(const PayoffProfile& profile, const Topology& topo,
                     const std::vector<double>& x, int i, const BestResponse& br) {
    const int n = topo.node_count();
    if (static_cast<int>(br.d.size()) != n) {
        throw ConfigError("verify_kkt_p2: allocation length mismatch");
    }

    const double xi = std::clamp(x[i], 0.0, 1.0);
    std::vector<int> hood = closed_neighborhood(topo, i);

    double mass = 0.0;
    for (int j = 0; j < n; ++j) {
        if (br.d[j] < -1e-12) {
            throw ConfigError("verify_kkt_p2: negative allocation at node " +
                              std::to_string(j + 1));
        }
        if (br.d[j] > 0.0 && std::find(hood.begin(), hood.end(), j) == hood.end()) {
            throw ConfigError("verify_kkt_p2: allocation outside the closed neighborhood");
        }
        mass += br.d[j];
    }
    if (std::abs(mass - xi) > 1e-10) {
        throw ConfigError("verify_kkt_p2: allocations sum to " + std::to_string(mass) +
                          ", expected " + std::to_string(xi));
    }

    if (xi <= 0.0) return 0.0; // empty node: the zero allocation is trivially optimal
    if (!br.eta_defined) {
        throw ConfigError("verify_kkt_p2: occupied node without a level");
    }

    // Multipliers: lambda = eta; mu_j = eta - u_j(post-move mass) must be
    // nonnegative and vanish wherever d_j > 0.
    double residual = 0.0;
    for (int j : hood) {
        const double existing = (j == i) ? 0.0 : std::clamp(x[j], 0.0, 1.0);
        const double post = std::clamp(existing + br.d[j], 0.0, 1.0);
        const double mu = br.eta - profile.density(j, post);
        residual = std::max(residual, -mu);               // dual feasibility
        residual = std::max(residual, std::abs(mu * br.d[j])); // complementary slackness
    }
    return residual;
}

BestResponse enumerate_supports_p2(const PayoffProfile& profile, const Topology& topo,
                                   const std::vector<double>& x, int i) {
    const int n = topo.node_count();
    const double xi = std::clamp(x[i], 0.0, 1.0);
    if (xi <= 0.0) return empty_response(i, n);

    std::vector<int> hood = closed_neighborhood(topo, i);
    const int h = static_cast<int>(hood.size());
    if (h > 20) {
        throw ConfigError("enumerate_supports_p2: closed neighborhood of " +
                          std::to_string(h) + " nodes exceeds the oracle limit of 20");
    }

    BestResponse best = empty_response(i, n);
    double best_score = -std::numeric_limits<double>::infinity();

    for (unsigned mask = 1; mask < (1u << h); ++mask) {
        std::vector<int> support;
        double mass = xi; // the mover's mass pours into every candidate set
        for (int b = 0; b < h; ++b) {
            if (!(mask & (1u << b))) continue;
            support.push_back(hood[b]);
            if (hood[b] != i) mass += std::clamp(x[hood[b]], 0.0, 1.0);
        }
        if (mass > static_cast<double>(support.size())) continue;

        double eta;
        try {
            eta = level_solve(profile, support, mass);
        } catch (const NumericError&) {
            continue; // no level exists for this receiving set
        }

        // Primal feasibility: refilling must not take mass away from a
        // receiving neighbor.
        std::vector<double> d(n, 0.0);
        bool feasible = true;
        for (int j : support) {
            const double target = profile.inverse_density(j, eta).value;
            const double existing = (j == i) ? 0.0 : std::clamp(x[j], 0.0, 1.0);
            if (target < existing - 1e-10) {
                feasible = false;
                break;
            }
            d[j] = std::max(0.0, target - existing);
        }
        if (!feasible) continue;

        const double score = p2_objective(profile, x, i, hood, d);
        if (score > best_score) {
            best_score = score;
            best.d = d;
            best.eta = eta;
            best.eta_defined = true;
            best.support = support;
            std::sort(best.support.begin(), best.support.end());
        }
    }

    if (!best.eta_defined) {
        throw NumericError("enumerate_supports_p2: no feasible receiving set (corrupt state?)");
    }
    return best;
}

std::vector<double> project_simplex(std::vector<double> v, double radius) {
    if (radius <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
    }
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    // Threshold rule: theta = (prefix sum - radius) / k for the longest
    // prefix of the sorted values staying above its own threshold.
    double cumulative = 0.0;
    double theta = sorted[0] - radius;
    for (size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
        if (sorted[k] > candidate) theta = candidate;
    }
    for (double& w : v) w = std::max(0.0, w - theta);
    return v;
}

BestResponse p2_projected_gradient(const PayoffProfile& profile, const Topology& topo,
                                   const std::vector<double>& x, int i,
                                   const std::vector<double>& d0) {
    const int n = topo.node_count();
    const double xi = std::clamp(x[i], 0.0, 1.0);
    if (xi <= 0.0) return empty_response(i, n);

    std::vector<int> hood = closed_neighborhood(topo, i);
    const int h = static_cast<int>(hood.size());

    std::vector<double> d(h, 0.0);
    for (int b = 0; b < h; ++b) d[b] = std::max(0.0, d0[hood[b]]);
    d = project_simplex(std::move(d), xi);

    const double lipschitz = std::max(profile.max_density_slope(), 1e-12);
    const double step = 1.0 / lipschitz;

    for (int iter = 0; iter < 100000; ++iter) {
        std::vector<double> next(h);
        for (int b = 0; b < h; ++b) {
            const int j = hood[b];
            const double existing = (j == i) ? 0.0 : std::clamp(x[j], 0.0, 1.0);
            const double post = std::clamp(existing + d[b], 0.0, 1.0);
            next[b] = d[b] + step * profile.density(j, post);
        }
        next = project_simplex(std::move(next), xi);

        double movement = 0.0;
        for (int b = 0; b < h; ++b) movement = std::max(movement, std::abs(next[b] - d[b]));
        d = std::move(next);
        if (movement * lipschitz <= 1e-10) break;
    }

    BestResponse br = empty_response(i, n);
    double level = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < h; ++b) {
        br.d[hood[b]] = d[b];
        if (d[b] > 1e-9) {
            const int j = hood[b];
            const double existing = (j == i) ? 0.0 : std::clamp(x[j], 0.0, 1.0);
            level = std::max(level, profile.density(j, std::clamp(existing + d[b], 0.0, 1.0)));
            br.support.push_back(j);
        }
    }
    br.eta = level;
    br.eta_defined = true;
    return br;
}

void nbrd_field(const PayoffProfile& profile, const Topology& topo,
                const std::vector<double>& x, FlowVector& delta_out,
                std::vector<double>& xdot_out) {
    delta_out.assign(topo.arc_count(), 0.0);
    for (int i = 0; i < topo.node_count(); ++i) {
        if (std::clamp(x[i], 0.0, 1.0) <= 0.0) continue;
        const BestResponse br = solve_node_best_response(profile, topo, x, i);
        for (int j : topo.neighbors(i)) {
            if (br.d[j] > 0.0) delta_out[topo.arc_index(i, j)] = br.d[j];
        }
    }
    xdot_out = apply_incidence(topo, delta_out);
}

} // namespace strataflow
