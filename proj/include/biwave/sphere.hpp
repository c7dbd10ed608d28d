#ifndef BIWAVE_SPHERE_HPP
#define BIWAVE_SPHERE_HPP

#include <span>
#include <vector>

#include "biwave/grid.hpp"
#include "biwave/spectral.hpp"

namespace biwave {

/*
 * Penalty construction for the unit sphere in R^{l+1}.
 *
 * chi is a C^infty monotone cutoff with chi(s) = s for s <= chi_lo and
 * chi(s) = 1 for s >= chi_hi, realized as the blend
 *     chi(s) = s + (1 - s) * sigma((s - chi_lo) / (chi_hi - chi_lo)),
 * sigma(t) = f(t) / (f(t) + f(1-t)), f(t) = exp(-1/t) for t > 0 else 0.
 *
 * The well itself is F(y) = chi((|y|^2 - 1)^2): zero exactly on the sphere,
 * flat (== 1) once (|y|^2 - 1)^2 >= chi_hi, with radial gradient
 *     grad F(y) = 4 chi'((|y|^2-1)^2) (|y|^2 - 1) y.
 * Near the sphere F(y) = (|y|^2 - 1)^2, so the restoring force on a radial
 * perturbation r = 1 + h is -F'(r)/eps ~ -(8/eps) h: penalty stiffness 8/eps.
 */
struct PenaltyParams {
    double epsilon = 1e-2;
    double chi_lo = 0.25;
    double chi_hi = 0.5;

    void validate() const;
    double stiffness() const { return 8.0 / epsilon; }
};

double chi(double s, const PenaltyParams& p);
double chi_prime(double s, const PenaltyParams& p);

double penalty(std::span<const double> y, const PenaltyParams& p);
void grad_penalty(std::span<const double> y, const PenaltyParams& p, std::span<double> out);

// Pointwise lifts to fields.
Field penalty_field(const Field& u, const PenaltyParams& p);       // scalar F(u(x))
Field grad_penalty_field(const Field& u, const PenaltyParams& p);  // (grad F)(u(x))

// Radial retraction y -> y/|y|.  Throws DegenerateVector below min_norm.
void project_sphere(std::span<const double> y, std::span<double> out, double min_norm = 1e-8);
Field project_sphere(const Field& f, double min_norm = 1e-8);

// Remove the component along base: w - <w, base> base (base assumed unit).
void project_tangent(std::span<const double> base, std::span<const double> w, std::span<double> out);
Field project_tangent(const Field& base, const Field& w);

/*
 * Lagrange multiplier of the geometric flow for a sphere-valued state (u, v):
 *     lambda = |Du|^2 - |v|^2 - D(|grad u|^2) - 2 sum_a d_a <Du, d_a u>
 * (D = Laplacian).  Equivalent, for |u| == 1, to <DDu, u> - |v|^2.
 */
Field lagrange_multiplier(const Field& u, const Field& v, SpectralWorkspace& ws);

}  // namespace biwave

#endif
