#ifndef BIWAVE_DIAGNOSTICS_HPP
#define BIWAVE_DIAGNOSTICS_HPP

#include <vector>

#include "biwave/dynamics.hpp"
#include "biwave/grid.hpp"
#include "biwave/record.hpp"
#include "biwave/sphere.hpp"
#include "biwave/spectral.hpp"

namespace biwave {

// Generator of rotations in the (i,j) coordinate plane of the ambient space:
// (Lambda w)_i = -w_j, (Lambda w)_j = w_i, other components zero.  For a unit
// vector u the pairing <phi, Lambda_ij u> = u_i phi_j - u_j phi_i.
struct SkewGenerator {
    int i = 0;
    int j = 1;
    void apply(std::span<const double> w, std::span<double> out) const;
};

// All (l+1)l/2 generators in lexicographic order for ambient dimension l+1.
std::vector<SkewGenerator> all_generators(int ambient_dim);

// E_geom = 1/2 int (|v|^2 + |Du|^2).
double energy_geometric(const State& s, SpectralWorkspace& ws);
// E_eps = E_geom + (1/eps) int F(u).  Equal to E_geom when u is sphere-valued.
double energy_penalized(const State& s, const PenaltyParams& p, SpectralWorkspace& ws);

// Q_ij = int <v, Lambda_ij u>.
double noether_charge(const State& s, const SkewGenerator& g);
std::vector<double> noether_charges(const State& s);

struct ConstraintNorms {
    double l2 = 0.0;    // || |u|^2 - 1 ||_{L^2}
    double linf = 0.0;  // max_x | |u(x)|^2 - 1 |
};
ConstraintNorms constraint_norms(const Field& u);

// int F(u) dx; bounded by eps * E_eps(0) along penalized trajectories.
double penalty_mass(const Field& u, const PenaltyParams& p);

/*
 * Pointwise identities of sphere-valued fields, reported as gaps (never
 * asserted: callers may probe off-sphere data on purpose):
 *   identity_gap_l2  L2 norm of <Du, u> + |grad u|^2   (== 0 when |u| == 1),
 *   ineq_violation   max over nodes of max(0, |grad u|^2 - |Du|),
 *   tangency_gap     L2 norm of <v, u>.
 */
struct SphereIdentityGaps {
    double identity_gap_l2 = 0.0;
    double ineq_violation = 0.0;
    double tangency_gap = 0.0;
};
SphereIdentityGaps sphere_identities(const Field& u, const Field& v, SpectralWorkspace& ws);

/*
 * Decomposition of an ambient field phi along a sphere-valued frame:
 *   normal coefficient  <phi, u>,
 *   plane coefficients  phi_ij = <phi, Lambda_ij u> = u_i phi_j - u_j phi_i.
 * Reassembly <phi,u> u + sum_{i<j} phi_ij Lambda_ij u equals |u|^2 phi
 * identically, hence phi itself on the sphere.  Throws OffSphere when
 * max_x ||u(x)| - 1| > tol.
 */
struct FrameDecomposition {
    Field normal;                 // scalar field <phi, u>
    std::vector<Field> plane;     // scalar fields phi_ij, generator order
};
FrameDecomposition frame_decompose(const Field& u, const Field& phi, double tol = 1e-8);
Field frame_reassemble(const Field& u, const FrameDecomposition& d);

/*
 * Residuals of the second-order flow at a jet (u, v, a):
 *   geometric_l2   L2 norm of the tangential part of a + DDu,
 *                  i.e. (a + DDu) - <a + DDu, u> u  (unit u assumed),
 *   pde_l2         L2 norm of a + DDu - lambda u with the explicit
 *                  multiplier lambda = |Du|^2 - |v|^2 - D|grad u|^2
 *                  - 2 Div <Du, grad u>,
 *   divergence_l2  sqrt of sum over generators of
 *                  || d_t <v, Lambda u> + D <Du, Lambda u>
 *                     - 2 Div <Du, Lambda grad u> ||_{L2}^2
 *                  with d_t <v, Lambda u> = <a, Lambda u> (v drops out by
 *                  skewness).  For unit u the summands recombine, by
 *                  Lagrange's identity, into exactly the tangential part of
 *                  a + DDu, so divergence_l2 == geometric_l2 up to rounding.
 */
struct ResidualNorms {
    double geometric_l2 = 0.0;
    double pde_l2 = 0.0;
    double divergence_l2 = 0.0;
};
ResidualNorms residual_equations(const Field& u, const Field& v, const Field& a,
                                 SpectralWorkspace& ws);

// Residual of the divergence form of the tangential-laplacian variant, whose
// flux carries the extra quartic term +2 Div <|grad u|^2 grad u, Lambda u>:
// sqrt of the sum over generators of the squared L2 norms.
double variant_divergence_residual(const Field& u, const Field& v, const Field& a,
                                   SpectralWorkspace& ws);

/*
 * Pointwise integrands of the two action functionals:
 *   wave_density     1/2 (|v|^2 - |Du|^2),
 *   shifted_density  1/2 (|v|^2 - |Du|^2 + |grad u|^4).
 * The second is the wave density with |Du|^2 replaced by |(Du)^T|^2: on the
 * sphere <Du, u> = -|grad u|^2, so the tangential part of Du has squared
 * norm |Du|^2 - |grad u|^4 and shifted - wave = 1/2 |grad u|^4 >= 0.
 */
struct ActionDensities {
    Field wave_density;
    Field shifted_density;
};
ActionDensities action_densities(const State& s, SpectralWorkspace& ws);

// Assemble one diagnostics row from a state and its acceleration.
DiagnosticsRecord make_record(const State& s, const Field& accel,
                              const PenaltyParams& p, SpectralWorkspace& ws);

}  // namespace biwave

#endif
