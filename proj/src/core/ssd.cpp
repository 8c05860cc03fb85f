#include "ssd.hpp"

#include <algorithm>

#include "errors.hpp"

namespace strataflow {

double ssd_outflow(const PayoffProfile& profile, const Topology& topo,
                   const std::vector<double>& x, int from, int to) {
    if (topo.arc_index(from, to) < 0) {
        throw ConfigError("ssd_outflow: (" + std::to_string(from + 1) + "," +
                          std::to_string(to + 1) + ") is not an arc");
    }

    // RK4 stage states can carry round-off debris; evaluate on clamped masses.
    const double xi = std::clamp(x[from], 0.0, 1.0);
    const double xj = std::clamp(x[to], 0.0, 1.0);
    if (xi <= 0.0) return 0.0;

    const double target_level = profile.density(to, xj);
    double y = profile.inverse_density(from, target_level).value;
    y = std::clamp(y, 0.0, xi);

    const double moved = target_level * (xi - y) -
                         (profile.cumulative(from, xi) - profile.cumulative(from, y));
    return std::max(0.0, moved);
}

void ssd_field(const PayoffProfile& profile, const Topology& topo,
               const std::vector<double>& x, FlowVector& delta_out,
               std::vector<double>& xdot_out) {
    const auto& arcs = topo.arcs();
    delta_out.assign(arcs.size(), 0.0);
    for (size_t m = 0; m < arcs.size(); ++m) {
        delta_out[m] = ssd_outflow(profile, topo, x, arcs[m].from, arcs[m].to);
    }
    xdot_out = apply_incidence(topo, delta_out);
}

} // namespace strataflow
