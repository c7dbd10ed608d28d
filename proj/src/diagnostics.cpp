#include "biwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "biwave/errors.hpp"

namespace biwave {

void SkewGenerator::apply(std::span<const double> w, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    out[j] = w[i];
    out[i] = -w[j];
}

std::vector<SkewGenerator> all_generators(int ambient_dim) {
    std::vector<SkewGenerator> gens;
    gens.reserve(static_cast<std::size_t>(ambient_dim) * (ambient_dim - 1) / 2);
    for (int i = 0; i < ambient_dim; ++i)
        for (int j = i + 1; j < ambient_dim; ++j) gens.push_back({i, j});
    return gens;
}

namespace {

// Scalar field <p, Lambda q> = p_j q_i - p_i q_j, pointwise.
Field skew_pairing(const Field& p, const Field& q, const SkewGenerator& g) {
    require_same_shape(p, q, "skew_pairing");
    Field out(p.grid, 1);
    const int c = p.components;
    for (std::size_t pt = 0; pt < p.num_points(); ++pt)
        out.values[pt] =
            p.values[pt * c + g.j] * q.values[pt * c + g.i] -
            p.values[pt * c + g.i] * q.values[pt * c + g.j];
    return out;
}

Field apply_generator(const Field& q, const SkewGenerator& g) {
    Field out(q.grid, q.components);
    const int c = q.components;
    for (std::size_t pt = 0; pt < q.num_points(); ++pt) {
        out.values[pt * c + g.j] = q.values[pt * c + g.i];
        out.values[pt * c + g.i] = -q.values[pt * c + g.j];
    }
    return out;
}

Field grad_norm2(const std::vector<Field>& grads) {
    Field out(grads[0].grid, 1);
    for (const Field& g : grads) axpy(1.0, pointwise_norm2(g), out);
    return out;
}

}  // namespace

double energy_geometric(const State& s, SpectralWorkspace& ws) {
    Field lap = laplacian(s.u, ws);
    Field density = pointwise_norm2(s.v);
    axpy(1.0, pointwise_norm2(lap), density);
    return 0.5 * integrate(density);
}

double energy_penalized(const State& s, const PenaltyParams& p, SpectralWorkspace& ws) {
    return energy_geometric(s, ws) + integrate(penalty_field(s.u, p)) / p.epsilon;
}

double noether_charge(const State& s, const SkewGenerator& g) {
    return integrate(skew_pairing(s.v, s.u, g));
}

std::vector<double> noether_charges(const State& s) {
    std::vector<double> out;
    for (const SkewGenerator& g : all_generators(s.u.components))
        out.push_back(noether_charge(s, g));
    return out;
}

ConstraintNorms constraint_norms(const Field& u) {
    Field c = pointwise_norm2(u);
    for (double& x : c.values) x -= 1.0;
    return {l2_norm(c), max_abs(c)};
}

double penalty_mass(const Field& u, const PenaltyParams& p) {
    return integrate(penalty_field(u, p));
}

SphereIdentityGaps sphere_identities(const Field& u, const Field& v, SpectralWorkspace& ws) {
    std::vector<Field> grads = gradient(u, ws);
    Field lap = laplacian(u, ws);
    Field gsq = grad_norm2(grads);

    SphereIdentityGaps gaps;
    Field identity = pointwise_dot(lap, u);
    axpy(1.0, gsq, identity);
    gaps.identity_gap_l2 = l2_norm(identity);

    double worst = 0.0;
    const int c = u.components;
    for (std::size_t pt = 0; pt < u.num_points(); ++pt) {
        double lap_norm2 = 0.0;
        for (int k = 0; k < c; ++k) {
            const double x = lap.values[pt * c + k];
            lap_norm2 += x * x;
        }
        worst = std::max(worst, gsq.values[pt] - std::sqrt(lap_norm2));
    }
    gaps.ineq_violation = std::max(0.0, worst);

    gaps.tangency_gap = l2_norm(pointwise_dot(v, u));
    return gaps;
}

FrameDecomposition frame_decompose(const Field& u, const Field& phi, double tol) {
    require_same_shape(u, phi, "frame_decompose");
    const int c = u.components;
    for (std::size_t pt = 0; pt < u.num_points(); ++pt) {
        double n2 = 0.0;
        for (int k = 0; k < c; ++k) n2 += u.values[pt * c + k] * u.values[pt * c + k];
        if (std::abs(std::sqrt(n2) - 1.0) > tol)
            throw OffSphere("frame_decompose: |u| deviates from 1 beyond tolerance");
    }

    FrameDecomposition d;
    d.normal = pointwise_dot(phi, u);

    // phi_ij = u_i w_j - u_j w_i with w = phi - <phi,u> u (the tangential
    // part; the <phi,u> terms cancel pairwise, but this is the form that
    // makes the coefficients manifestly frame coefficients).
    Field w(u.grid, c);
    for (std::size_t pt = 0; pt < u.num_points(); ++pt)
        for (int k = 0; k < c; ++k)
            w.values[pt * c + k] =
                phi.values[pt * c + k] - d.normal.values[pt] * u.values[pt * c + k];

    for (const SkewGenerator& g : all_generators(c)) {
        Field coeff(u.grid, 1);
        for (std::size_t pt = 0; pt < u.num_points(); ++pt)
            coeff.values[pt] = u.values[pt * c + g.i] * w.values[pt * c + g.j] -
                               u.values[pt * c + g.j] * w.values[pt * c + g.i];
        d.plane.push_back(std::move(coeff));
    }
    return d;
}

Field frame_reassemble(const Field& u, const FrameDecomposition& d) {
    const int c = u.components;
    Field out(u.grid, c);
    for (std::size_t pt = 0; pt < u.num_points(); ++pt)
        for (int k = 0; k < c; ++k)
            out.values[pt * c + k] = d.normal.values[pt] * u.values[pt * c + k];

    const std::vector<SkewGenerator> gens = all_generators(c);
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
        const SkewGenerator& g = gens[gi];
        const Field& coeff = d.plane[gi];
        for (std::size_t pt = 0; pt < u.num_points(); ++pt) {
            // coeff * Lambda_ij u: adds coeff*u_i at slot j, -coeff*u_j at i.
            out.values[pt * c + g.j] += coeff.values[pt] * u.values[pt * c + g.i];
            out.values[pt * c + g.i] -= coeff.values[pt] * u.values[pt * c + g.j];
        }
    }
    return out;
}

ResidualNorms residual_equations(const Field& u, const Field& v, const Field& a,
                                 SpectralWorkspace& ws) {
    require_same_shape(u, v, "residual_equations");
    require_same_shape(u, a, "residual_equations");

    Field r0 = bilaplacian(u, ws);
    axpy(1.0, a, r0);  // r0 = a + DDu

    ResidualNorms out;
    out.geometric_l2 = l2_norm(project_tangent(u, r0));

    Field lam = lagrange_multiplier(u, v, ws);
    Field pde = r0;
    const int c = u.components;
    for (std::size_t pt = 0; pt < u.num_points(); ++pt)
        for (int k = 0; k < c; ++k)
            pde.values[pt * c + k] -= lam.values[pt] * u.values[pt * c + k];
    out.pde_l2 = l2_norm(pde);

    std::vector<Field> grads = gradient(u, ws);
    Field lap = laplacian(u, ws);
    double sq = 0.0;
    for (const SkewGenerator& g : all_generators(c)) {
        Field res = skew_pairing(a, u, g);  // <a, Lambda u> = d_t <v, Lambda u>
        axpy(1.0, laplacian(skew_pairing(lap, u, g), ws), res);
        Field twisted = div_contraction(
            lap, grads, ws,
            [&g](std::span<const double> in, std::span<double> o) { g.apply(in, o); });
        axpy(-2.0, twisted, res);
        const double n = l2_norm(res);
        sq += n * n;
    }
    out.divergence_l2 = std::sqrt(sq);
    return out;
}

double variant_divergence_residual(const Field& u, const Field& v, const Field& a,
                                   SpectralWorkspace& ws) {
    require_same_shape(u, v, "variant_divergence_residual");
    require_same_shape(u, a, "variant_divergence_residual");

    std::vector<Field> grads = gradient(u, ws);
    Field lap = laplacian(u, ws);
    Field gsq = grad_norm2(grads);

    // Quartic flux h_a = |grad u|^2 d_a u of the variant equation.
    std::vector<Field> flux;
    const int c = u.components;
    for (const Field& g : grads) {
        Field h(u.grid, c);
        for (std::size_t pt = 0; pt < u.num_points(); ++pt)
            for (int k = 0; k < c; ++k)
                h.values[pt * c + k] = gsq.values[pt] * g.values[pt * c + k];
        flux.push_back(std::move(h));
    }

    double sq = 0.0;
    for (const SkewGenerator& g : all_generators(c)) {
        Field res = skew_pairing(a, u, g);
        axpy(1.0, laplacian(skew_pairing(lap, u, g), ws), res);
        Field twisted = div_contraction(
            lap, grads, ws,
            [&g](std::span<const double> in, std::span<double> o) { g.apply(in, o); });
        axpy(-2.0, twisted, res);
        // Extra conserved flux of the modified law: +2 Div <h, Lambda u>.
        Field lu = apply_generator(u, g);
        axpy(2.0, div_contraction(lu, flux, ws), res);
        const double n = l2_norm(res);
        sq += n * n;
    }
    return std::sqrt(sq);
}

ActionDensities action_densities(const State& s, SpectralWorkspace& ws) {
    std::vector<Field> grads = gradient(s.u, ws);
    Field lap = laplacian(s.u, ws);
    Field gsq = grad_norm2(grads);

    ActionDensities out;
    out.wave_density = pointwise_norm2(s.v);
    axpy(-1.0, pointwise_norm2(lap), out.wave_density);
    for (double& x : out.wave_density.values) x *= 0.5;

    out.shifted_density = out.wave_density;
    for (std::size_t pt = 0; pt < gsq.values.size(); ++pt)
        out.shifted_density.values[pt] += 0.5 * gsq.values[pt] * gsq.values[pt];
    return out;
}

DiagnosticsRecord make_record(const State& s, const Field& accel, const PenaltyParams& p,
                              SpectralWorkspace& ws) {
    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.energy_geometric = energy_geometric(s, ws);
    rec.penalty_mass = penalty_mass(s.u, p);
    rec.energy_penalized = rec.energy_geometric + rec.penalty_mass / p.epsilon;
    const ConstraintNorms cn = constraint_norms(s.u);
    rec.constraint_l2 = cn.l2;
    rec.constraint_linf = cn.linf;
    rec.charges = noether_charges(s);

    Field r0 = bilaplacian(s.u, ws);
    axpy(1.0, accel, r0);
    rec.tangential_residual_l2 = l2_norm(project_tangent(s.u, r0));

    rec.identity_gap_l2 = sphere_identities(s.u, s.v, ws).identity_gap_l2;
    return rec;
}

}  // namespace biwave
