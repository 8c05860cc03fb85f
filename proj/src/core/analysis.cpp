#include "analysis.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace strataflow {

NashReport is_nash(const PayoffProfile& profile, const Topology& topo,
                   const std::vector<double>& x, double tol) {
    NashReport report;
    for (int i = 0; i < topo.node_count(); ++i) {
        if (x[i] > kSupportThreshold) report.support.push_back(i);
    }

    double worst = 0.0;
    for (int i : report.support) {
        const double own = profile.density(i, std::clamp(x[i], 0.0, 1.0));
        for (int j : topo.neighbors(i)) {
            const double theirs = profile.density(j, std::clamp(x[j], 0.0, 1.0));
            worst = std::max(worst, theirs - own);
        }
    }
    report.worst_violation = worst;
    report.is_nash = worst <= tol;
    return report;
}

SpcReport check_spc(const PayoffProfile& profile, const Topology& topo,
                    const std::vector<double>& x, const FlowVector& delta, double tol) {
    if (static_cast<int>(delta.size()) != topo.arc_count()) {
        throw ConfigError("check_spc: flow vector length mismatch");
    }
    SpcReport report;
    const auto& arcs = topo.arcs();
    for (int m = 0; m < static_cast<int>(arcs.size()); ++m) {
        const int i = arcs[m].from, j = arcs[m].to;
        const double ui = profile.density(i, std::clamp(x[i], 0.0, 1.0));
        const double uj = profile.density(j, std::clamp(x[j], 0.0, 1.0));
        if (ui >= uj && delta[m] > tol) {
            report.satisfied = false;
            report.violations.push_back(arcs[m]);
        }
    }
    return report;
}

double equilibrium_residual(const PayoffProfile& profile, const Topology& topo,
                            const std::vector<double>& x, Dynamics kind) {
    const FieldEval fe = eval_field(profile, topo, kind, x);
    double r = 0.0;
    for (double v : fe.xdot) r = std::max(r, std::abs(v));
    return r;
}

Waterfill global_waterfill(const PayoffProfile& profile) {
    const int n = profile.size();

    // Same greedy waterfilling as a node's best response, but over every
    // node with the whole unit mass and no pre-existing occupancy.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ea = profile.density(a, 0.0);
        const double eb = profile.density(b, 0.0);
        return ea != eb ? ea > eb : a < b;
    });

    std::vector<int> support;
    double eta = 0.0;
    for (int k = 0; k < n; ++k) {
        const int i = order[k];
        if (k > 0 && profile.density(i, 0.0) <= eta) break;
        support.push_back(i);
        eta = level_solve(profile, support, 1.0);
    }

    Waterfill wf;
    wf.level = eta;
    wf.x.assign(n, 0.0);
    double total = 0.0;
    for (int i : support) {
        wf.x[i] = profile.inverse_density(i, eta).value;
        total += wf.x[i];
    }
    // Scale out the level-solve residual so the point sits on the simplex
    // exactly.
    if (total > 0.0) {
        for (int i : support) wf.x[i] /= total;
    }
    return wf;
}

} // namespace strataflow
