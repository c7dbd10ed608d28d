#include "biwave/sphere.hpp"

#include <cmath>

#include "biwave/errors.hpp"
#include "biwave/parallel.hpp"

namespace biwave {

void PenaltyParams::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("penalty epsilon must be positive");
    if (!(chi_lo > 0.0) || !(chi_hi > chi_lo))
        throw ConfigError("penalty cutoff must satisfy 0 < chi_lo < chi_hi");
}

namespace {

// exp(-1/t) bump and the standard C^infty step built from it.
double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double f = bump(t), g = bump(1.0 - t);
    return f / (f + g);
}

double smooth_step_prime(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double f = bump(t), g = bump(1.0 - t);
    const double fp = bump_prime(t), gp = bump_prime(1.0 - t);
    // (f/(f+g))' = (f' g + f g') / (f+g)^2
    return (fp * g + f * gp) / ((f + g) * (f + g));
}

}  // namespace

double chi(double s, const PenaltyParams& p) {
    if (s <= p.chi_lo) return s;
    if (s >= p.chi_hi) return 1.0;
    const double t = (s - p.chi_lo) / (p.chi_hi - p.chi_lo);
    // s + (1-s) sigma = sigma + s (1 - sigma): convex blend of s and 1.
    return s + (1.0 - s) * smooth_step(t);
}

double chi_prime(double s, const PenaltyParams& p) {
    if (s <= p.chi_lo) return 1.0;
    if (s >= p.chi_hi) return 0.0;
    const double t = (s - p.chi_lo) / (p.chi_hi - p.chi_lo);
    return 1.0 - smooth_step(t) + (1.0 - s) * smooth_step_prime(t) / (p.chi_hi - p.chi_lo);
}

double penalty(std::span<const double> y, const PenaltyParams& p) {
    double n2 = 0.0;
    for (double x : y) n2 += x * x;
    const double q = (n2 - 1.0) * (n2 - 1.0);
    return chi(q, p);
}

void grad_penalty(std::span<const double> y, const PenaltyParams& p, std::span<double> out) {
    double n2 = 0.0;
    for (double x : y) n2 += x * x;
    const double q = (n2 - 1.0) * (n2 - 1.0);
    const double factor = 4.0 * chi_prime(q, p) * (n2 - 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = factor * y[i];
}

Field penalty_field(const Field& u, const PenaltyParams& p) {
    Field out(u.grid, 1);
    const int comps = u.components;
    parallel_for(u.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pt = lo; pt < hi; ++pt)
            out.values[pt] =
                penalty(std::span<const double>(u.values.data() + pt * comps, comps), p);
    });
    return out;
}

Field grad_penalty_field(const Field& u, const PenaltyParams& p) {
    Field out(u.grid, u.components);
    const int comps = u.components;
    parallel_for(u.num_points(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t pt = lo; pt < hi; ++pt)
            grad_penalty(std::span<const double>(u.values.data() + pt * comps, comps), p,
                         std::span<double>(out.values.data() + pt * comps, comps));
    });
    return out;
}

void project_sphere(std::span<const double> y, std::span<double> out, double min_norm) {
    double n2 = 0.0;
    for (double x : y) n2 += x * x;
    const double n = std::sqrt(n2);
    if (!(n >= min_norm)) throw DegenerateVector("cannot retract vector of norm " + std::to_string(n));
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] / n;
}

Field project_sphere(const Field& f, double min_norm) {
    Field out(f.grid, f.components);
    const int comps = f.components;
    for (std::size_t pt = 0; pt < f.num_points(); ++pt)
        project_sphere(std::span<const double>(f.values.data() + pt * comps, comps),
                       std::span<double>(out.values.data() + pt * comps, comps), min_norm);
    return out;
}

void project_tangent(std::span<const double> base, std::span<const double> w,
                     std::span<double> out) {
    double d = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) d += w[i] * base[i];
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = w[i] - d * base[i];
}

Field project_tangent(const Field& base, const Field& w) {
    require_same_shape(base, w, "project_tangent");
    Field out(w.grid, w.components);
    const int comps = w.components;
    for (std::size_t pt = 0; pt < w.num_points(); ++pt)
        project_tangent(std::span<const double>(base.values.data() + pt * comps, comps),
                        std::span<const double>(w.values.data() + pt * comps, comps),
                        std::span<double>(out.values.data() + pt * comps, comps));
    return out;
}

Field lagrange_multiplier(const Field& u, const Field& v, SpectralWorkspace& ws) {
    require_same_shape(u, v, "lagrange_multiplier");
    std::vector<Field> grads = gradient(u, ws);
    Field lap = laplacian(u, ws);

    Field grad_sq(u.grid, 1);
    for (const Field& g : grads) {
        Field n2 = pointwise_norm2(g);
        axpy(1.0, n2, grad_sq);
    }

    // |Du|^2 - |v|^2 - D|grad u|^2 - 2 sum_a d_a <Du, d_a u>
    Field lam = pointwise_norm2(lap);
    axpy(-1.0, pointwise_norm2(v), lam);
    axpy(-1.0, laplacian(grad_sq, ws), lam);
    axpy(-2.0, div_contraction(lap, grads, ws), lam);
    return lam;
}

}  // namespace biwave
