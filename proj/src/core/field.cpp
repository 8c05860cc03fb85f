#include "field.hpp"

#include "errors.hpp"
#include "nbrd.hpp"
#include "nrpm.hpp"
#include "ssd.hpp"

namespace strataflow {

std::string dynamics_name(Dynamics kind) {
    switch (kind) {
        case Dynamics::Ssd: return "ssd";
        case Dynamics::Nbrd: return "nbrd";
        case Dynamics::Nrpm: return "nrpm";
    }
    return "?";
}

Dynamics dynamics_from_name(const std::string& name) {
    if (name == "ssd") return Dynamics::Ssd;
    if (name == "nbrd") return Dynamics::Nbrd;
    if (name == "nrpm") return Dynamics::Nrpm;
    throw ConfigError("dynamics: unknown kind \"" + name + "\" (expected ssd, nbrd, or nrpm)");
}

FieldEval eval_field(const PayoffProfile& profile, const Topology& topo, Dynamics kind,
                     const std::vector<double>& x, std::vector<double>* warm_d) {
    FieldEval fe;
    switch (kind) {
        case Dynamics::Ssd:
            ssd_field(profile, topo, x, fe.delta, fe.xdot);
            break;
        case Dynamics::Nbrd:
            nbrd_field(profile, topo, x, fe.delta, fe.xdot);
            break;
        case Dynamics::Nrpm:
            nrpm_field(profile, topo, x, fe.delta, fe.xdot, warm_d);
            break;
    }
    return fe;
}

} // namespace strataflow
