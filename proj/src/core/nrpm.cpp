#include "nrpm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "errors.hpp"
#include "nbrd.hpp" // project_simplex

namespace strataflow {

namespace {

// Destinations a row can use: the node itself plus its neighbors.
std::vector<std::vector<int>> row_targets(const Topology& topo) {
    std::vector<std::vector<int>> targets(topo.node_count());
    for (int i = 0; i < topo.node_count(); ++i) {
        targets[i].push_back(i);
        for (int j : topo.neighbors(i)) targets[i].push_back(j);
    }
    return targets;
}

std::vector<double> column_sums(const std::vector<std::vector<int>>& targets,
                                const std::vector<double>& d, int n) {
    std::vector<double> z(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j : targets[i]) z[j] += d[static_cast<size_t>(i) * n + j];
    }
    return z;
}

} // namespace

Reallocation solve_p3(const PayoffProfile& profile, const Topology& topo,
                      const std::vector<double>& x, const std::vector<double>* warm_d) {
    const int n = topo.node_count();
    if (static_cast<int>(x.size()) != n) {
        throw ConfigError("solve_p3: state length mismatch");
    }

    const auto targets = row_targets(topo);
    std::vector<double> mass(n);
    for (int i = 0; i < n; ++i) mass[i] = std::clamp(x[i], 0.0, 1.0);

    // Start from the warm plan re-projected onto the current row masses,
    // or from the identity plan (everything stays put).
    std::vector<double> d(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (mass[i] <= 0.0) continue;
        std::vector<double> row(targets[i].size(), 0.0);
        if (warm_d && warm_d->size() == d.size()) {
            for (size_t b = 0; b < targets[i].size(); ++b) {
                row[b] = std::max(0.0, (*warm_d)[static_cast<size_t>(i) * n + targets[i][b]]);
            }
            row = project_simplex(std::move(row), mass[i]);
        } else {
            row[0] = mass[i]; // targets[i][0] is the node itself
        }
        for (size_t b = 0; b < targets[i].size(); ++b) {
            d[static_cast<size_t>(i) * n + targets[i][b]] = row[b];
        }
    }

    const double lipschitz =
        std::max(1e-12, (topo.max_degree() + 1) * profile.max_density_slope());
    const double step = 1.0 / lipschitz;

    Reallocation out;
    double movement = std::numeric_limits<double>::infinity();
    int iter = 0;
    std::vector<double> z = column_sums(targets, d, n);
    std::vector<double> grad(n);
    std::vector<double> row;
    for (; iter < 100000; ++iter) {
        movement = 0.0;
        for (int j = 0; j < n; ++j) grad[j] = profile.density(j, std::clamp(z[j], 0.0, 1.0));

        for (int i = 0; i < n; ++i) {
            if (mass[i] <= 0.0) continue;
            row.resize(targets[i].size());
            for (size_t b = 0; b < targets[i].size(); ++b) {
                row[b] = d[static_cast<size_t>(i) * n + targets[i][b]] + step * grad[targets[i][b]];
            }
            row = project_simplex(std::move(row), mass[i]);
            for (size_t b = 0; b < targets[i].size(); ++b) {
                double& slot = d[static_cast<size_t>(i) * n + targets[i][b]];
                movement = std::max(movement, std::abs(row[b] - slot));
                slot = row[b];
            }
        }
        std::fill(z.begin(), z.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j : targets[i]) z[j] += d[static_cast<size_t>(i) * n + j];
        }
        if (movement * lipschitz <= 1e-9) {
            ++iter;
            break;
        }
    }

    if (movement * lipschitz > 1e-6) {
        throw ConvergenceError("solve_p3: projected gradient stalled at update norm " +
                               std::to_string(movement * lipschitz) + " after " +
                               std::to_string(iter) + " iterations");
    }

    out.z = std::move(z);
    out.d = std::move(d);
    out.iterations = iter;
    out.objective = profile.social_utility(out.z);
    out.kkt_residual = verify_kkt_p3(profile, topo, x, out);
    return out;
}

std::vector<double> z_star(const PayoffProfile& profile, const Topology& topo,
                           const std::vector<double>& x) {
    return solve_p3(profile, topo, x).z;
}

void nrpm_field(const PayoffProfile& profile, const Topology& topo,
                const std::vector<double>& x, FlowVector& delta_out,
                std::vector<double>& xdot_out, std::vector<double>* warm_d) {
    const int n = topo.node_count();
    Reallocation plan = solve_p3(profile, topo, x,
                                 (warm_d && !warm_d->empty()) ? warm_d : nullptr);

    delta_out.assign(topo.arc_count(), 0.0);
    const auto& arcs = topo.arcs();
    for (int m = 0; m < static_cast<int>(arcs.size()); ++m) {
        delta_out[m] = plan.d[static_cast<size_t>(arcs[m].from) * n + arcs[m].to];
    }

    xdot_out.resize(n);
    for (int i = 0; i < n; ++i) xdot_out[i] = plan.z[i] - x[i];

    if (warm_d) *warm_d = std::move(plan.d);
}

std::vector<double> support_value(const PayoffProfile& profile, const Topology& topo,
                                  const std::vector<double>& x,
                                  const std::vector<Arc>& pattern) {
    const OdDecomposition od = od_decompose(topo, pattern);
    std::vector<double> value(topo.node_count(), 0.0);
    for (const OdComponent& comp : od.components) {
        double mass = 0.0;
        for (int k : comp.origins) mass += std::clamp(x[k], 0.0, 1.0);
        const double eta = level_solve(profile, comp.destinations, mass);
        for (int j : comp.destinations) {
            value[j] = profile.inverse_density(j, eta).value;
        }
    }
    return value;
}

bool verify_support_pattern(const PayoffProfile& profile, const Topology& topo,
                            const std::vector<double>& x, const Reallocation& plan) {
    const int n = topo.node_count();
    constexpr double kMassTol = 1e-9;

    std::vector<Arc> pattern;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (plan.d[static_cast<size_t>(i) * n + j] > kMassTol) pattern.push_back({i, j});
        }
    }

    const OdDecomposition od = od_decompose(topo, pattern);
    std::vector<bool> is_origin(n, false);
    for (const OdComponent& comp : od.components) {
        for (int k : comp.origins) is_origin[k] = true;
    }

    for (int i = 0; i < n; ++i) {
        if (x[i] <= kMassTol) continue;
        bool routes = false;
        for (int j = 0; j < n && !routes; ++j) {
            routes = plan.d[static_cast<size_t>(i) * n + j] > kMassTol;
        }
        if (!routes) return false;     // occupied node with no outgoing mass
        if (!is_origin[i]) return false; // occupied node outside every origin set
    }

    std::vector<double> predicted;
    try {
        predicted = support_value(profile, topo, x, pattern);
    } catch (const NumericError&) {
        return false;
    }
    for (int j = 0; j < n; ++j) {
        if (std::abs(predicted[j] - plan.z[j]) > 1e-6) return false;
    }
    return true;
}

double verify_kkt_p3(const PayoffProfile& profile, const Topology& topo,
                     const std::vector<double>& x, const Reallocation& plan) {
    const int n = topo.node_count();
    if (static_cast<int>(plan.z.size()) != n ||
        plan.d.size() != static_cast<size_t>(n) * n) {
        throw ConfigError("verify_kkt_p3: plan dimensions mismatch");
    }

    const auto targets = row_targets(topo);
    double residual = 0.0;

    // Feasibility: nonnegative entries, rows sum to their node's mass,
    // z matches the column sums.
    for (int i = 0; i < n; ++i) {
        double row_mass = 0.0;
        for (int j = 0; j < n; ++j) {
            const double dij = plan.d[static_cast<size_t>(i) * n + j];
            residual = std::max(residual, -dij);
            row_mass += dij;
        }
        residual = std::max(residual, std::abs(row_mass - std::clamp(x[i], 0.0, 1.0)));
    }
    const std::vector<double> cols = column_sums(targets, plan.d, n);
    for (int j = 0; j < n; ++j) {
        residual = std::max(residual, std::abs(cols[j] - plan.z[j]));
    }

    // Stationarity: within each row the used destinations must offer the
    // best post-reallocation density reachable from that row.
    for (int i = 0; i < n; ++i) {
        if (std::clamp(x[i], 0.0, 1.0) <= 0.0) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (int j : targets[i]) {
            best = std::max(best, profile.density(j, std::clamp(plan.z[j], 0.0, 1.0)));
        }
        for (int j : targets[i]) {
            const double slack = best - profile.density(j, std::clamp(plan.z[j], 0.0, 1.0));
            const double dij = plan.d[static_cast<size_t>(i) * n + j];
            residual = std::max(residual, std::abs(slack * dij));
        }
    }
    return residual;
}

Reallocation brute_force_p3(const PayoffProfile& profile, const Topology& topo,
                            const std::vector<double>& x, double grid_step) {
    const int n = topo.node_count();
    if (grid_step < 0.025 - 1e-12) {
        throw ConfigError("brute_force_p3: grid step below the 0.025 oracle floor");
    }

    const auto targets = row_targets(topo);
    std::vector<int> occupied;
    std::vector<long> counts;
    long dims = 0;
    for (int i = 0; i < n; ++i) {
        const double xi = std::clamp(x[i], 0.0, 1.0);
        if (xi <= 1e-12) continue;
        const long c = std::lround(xi / grid_step);
        if (std::abs(static_cast<double>(c) * grid_step - xi) > 1e-9) {
            throw ConfigError("brute_force_p3: x_" + std::to_string(i + 1) +
                              " = " + std::to_string(xi) + " is off the grid");
        }
        occupied.push_back(i);
        counts.push_back(c);
        dims += static_cast<long>(targets[i].size());
    }
    if (dims > 8) {
        throw ConfigError("brute_force_p3: plan dimension " + std::to_string(dims) +
                          " exceeds the oracle limit of 8");
    }

    Reallocation best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::vector<double> d(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> z(n, 0.0);

    // Depth-first over rows; each row enumerates the compositions of its
    // mass count over its targets.
    std::vector<std::vector<long>> row_units(occupied.size());
    auto evaluate_leaf = [&]() {
        std::fill(z.begin(), z.end(), 0.0);
        std::fill(d.begin(), d.end(), 0.0);
        for (size_t r = 0; r < occupied.size(); ++r) {
            const int i = occupied[r];
            for (size_t b = 0; b < targets[i].size(); ++b) {
                const double amount = static_cast<double>(row_units[r][b]) * grid_step;
                d[static_cast<size_t>(i) * n + targets[i][b]] = amount;
                z[targets[i][b]] += amount;
            }
        }
        const double score = profile.social_utility(z);
        if (score > best.objective) {
            best.objective = score;
            best.z = z;
            best.d = d;
        }
    };

    // Iterative composition enumeration per row, recursing across rows.
    std::function<void(size_t)> recurse = [&](size_t r) {
        if (r == occupied.size()) {
            evaluate_leaf();
            return;
        }
        const int i = occupied[r];
        const size_t slots = targets[i].size();
        std::vector<long>& units = row_units[r];
        units.assign(slots, 0);

        std::function<void(size_t, long)> fill = [&](size_t b, long remaining) {
            if (b + 1 == slots) {
                units[b] = remaining;
                recurse(r + 1);
                return;
            }
            for (long take = 0; take <= remaining; ++take) {
                units[b] = take;
                fill(b + 1, remaining - take);
            }
        };
        fill(0, counts[r]);
    };
    recurse(0);

    best.kkt_residual = verify_kkt_p3(profile, topo, x, best);
    best.iterations = 0;
    return best;
}

} // namespace strataflow
