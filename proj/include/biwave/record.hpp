#ifndef BIWAVE_RECORD_HPP
#define BIWAVE_RECORD_HPP

#include <vector>

namespace biwave {

// One row of scalar observables sampled along a trajectory.  charges holds
// the conserved rotation charges Q_ij in lexicographic (i,j) order, i < j.
struct DiagnosticsRecord {
    double t = 0.0;
    double energy_penalized = 0.0;
    double energy_geometric = 0.0;
    double penalty_mass = 0.0;
    double constraint_l2 = 0.0;
    double constraint_linf = 0.0;
    std::vector<double> charges;
    double tangential_residual_l2 = 0.0;
    double identity_gap_l2 = 0.0;
};

}  // namespace biwave

#endif
