#include "biwave/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "biwave/diagnostics.hpp"
#include "biwave/errors.hpp"
#include "biwave/parallel.hpp"

namespace biwave {

void IntegratorConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("integrator dt must be positive");
    penalty.validate();
}

namespace {

void check_finite(const State& s) {
    for (double x : s.u.values)
        if (!std::isfinite(x)) throw NonFinite(s.t, "non-finite position at t = " + std::to_string(s.t));
    for (double x : s.v.values)
        if (!std::isfinite(x)) throw NonFinite(s.t, "non-finite velocity at t = " + std::to_string(s.t));
}

// v -= dt * (grad F(u)/eps [+ 2 Div(|grad u|^2 grad u)]).  Exact flow of the
// frozen-u subsystem; the only place the nonlinear forces enter the splitting.
State kick(const State& s, double dt, const IntegratorConfig& cfg, SpectralWorkspace& ws) {
    State out;
    out.u = s.u;
    out.t = s.t;
    Field force = grad_penalty_field(s.u, cfg.penalty);
    const double inv_eps = 1.0 / cfg.penalty.epsilon;
    for (double& x : force.values) x *= inv_eps;
    if (cfg.variant == Variant::tangential_laplacian)
        axpy(2.0, variant_force(s.u, ws, cfg.dealias_variant), force);
    out.v = s.v;
    axpy(-dt, force, out.v);
    return out;
}

}  // namespace

State linear_propagate(const State& s, double dt, SpectralWorkspace& ws) {
    require_same_shape(s.u, s.v, "linear_propagate");
    State out;
    out.u = Field(s.u.grid, s.u.components);
    out.v = Field(s.v.grid, s.v.components);
    out.t = s.t + dt;

    auto& uhat = ws.scratch_a();
    auto& vhat = ws.scratch_b();
    std::complex<double>* spec = ws.spectrum();
    const auto& xi2 = ws.xi_squared();
    const std::size_t ns = ws.spectrum_size();

    for (int c = 0; c < s.u.components; ++c) {
        ws.forward(s.u, c);
        uhat.assign(spec, spec + ns);
        ws.forward(s.v, c);
        vhat.assign(spec, spec + ns);

        for (std::size_t k = 0; k < ns; ++k) {
            const double mu = xi2[k];
            if (mu == 0.0) {
                uhat[k] += dt * vhat[k];  // free mode: straight-line motion
            } else {
                const double co = std::cos(mu * dt);
                const double si = std::sin(mu * dt);
                const std::complex<double> u0 = uhat[k];
                const std::complex<double> v0 = vhat[k];
                uhat[k] = co * u0 + (si / mu) * v0;
                vhat[k] = -mu * si * u0 + co * v0;
            }
        }

        std::copy(uhat.begin(), uhat.end(), spec);
        ws.inverse(out.u, c);
        std::copy(vhat.begin(), vhat.end(), spec);
        ws.inverse(out.v, c);
    }
    return out;
}

State penalty_kick(const State& s, double dt, const PenaltyParams& p) {
    State out;
    out.u = s.u;
    out.t = s.t;
    out.v = s.v;
    Field force = grad_penalty_field(s.u, p);
    axpy(-dt / p.epsilon, force, out.v);
    return out;
}

Field variant_force(const Field& u, SpectralWorkspace& ws, bool dealias) {
    std::vector<Field> grads = gradient(u, ws);

    Field grad_sq(u.grid, 1);
    for (const Field& g : grads) axpy(1.0, pointwise_norm2(g), grad_sq);

    std::vector<Field> flux;
    flux.reserve(grads.size());
    const std::size_t np = u.num_points();
    const int comps = u.components;
    for (const Field& g : grads) {
        Field h(u.grid, comps);
        for (std::size_t pt = 0; pt < np; ++pt)
            for (int c = 0; c < comps; ++c)
                h.values[pt * comps + c] = grad_sq.values[pt] * g.values[pt * comps + c];
        if (dealias) low_pass_two_thirds(h, ws);
        flux.push_back(std::move(h));
    }
    return divergence(flux, ws);
}

Field acceleration(const Field& u, const IntegratorConfig& cfg, SpectralWorkspace& ws) {
    Field a = bilaplacian(u, ws);
    for (double& x : a.values) x = -x;
    axpy(-1.0 / cfg.penalty.epsilon, grad_penalty_field(u, cfg.penalty), a);
    if (cfg.variant == Variant::tangential_laplacian)
        axpy(-2.0, variant_force(u, ws, cfg.dealias_variant), a);
    return a;
}

State step_strang(const State& s, const IntegratorConfig& cfg, SpectralWorkspace& ws) {
    State half = kick(s, 0.5 * cfg.dt, cfg, ws);
    State drifted = linear_propagate(half, cfg.dt, ws);
    State out = kick(drifted, 0.5 * cfg.dt, cfg, ws);
    check_finite(out);
    return out;
}

double verlet_stability_limit(const GridSpec& grid, const PenaltyParams& p) {
    double xi2_max = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
        const double xi = std::numbers::pi * grid.points[a] / grid.lengths[a];  // Nyquist
        xi2_max += xi * xi;
    }
    const double lambda_max = xi2_max * xi2_max + p.stiffness();
    return 1.9 / std::sqrt(lambda_max);
}

State step_verlet(const State& s, const IntegratorConfig& cfg, SpectralWorkspace& ws) {
    const double limit = verlet_stability_limit(s.u.grid, cfg.penalty);
    if (std::abs(cfg.dt) > limit)
        throw StabilityViolation("dt = " + std::to_string(cfg.dt) +
                                 " exceeds the stability budget " + std::to_string(limit));
    const double dt = cfg.dt;
    State out;
    out.t = s.t + dt;

    Field a0 = acceleration(s.u, cfg, ws);
    Field v_half = s.v;
    axpy(0.5 * dt, a0, v_half);
    out.u = s.u;
    axpy(dt, v_half, out.u);
    Field a1 = acceleration(out.u, cfg, ws);
    out.v = std::move(v_half);
    axpy(0.5 * dt, a1, out.v);
    check_finite(out);
    return out;
}

namespace {

State step_signed(const State& s, const IntegratorConfig& cfg, SpectralWorkspace& ws, double dt) {
    IntegratorConfig c = cfg;
    c.dt = dt;
    return cfg.scheme == Scheme::velocity_verlet ? step_verlet(s, c, ws) : step_strang(s, c, ws);
}

std::size_t step_count(double T, double dt) {
    const double ratio = T / dt;
    const double rounded = std::round(ratio);
    // Land exactly on T when T is an integer multiple of dt up to rounding;
    // otherwise overshoot by at most one step (records carry the true t).
    if (rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio))
        return static_cast<std::size_t>(rounded);
    return static_cast<std::size_t>(std::ceil(ratio));
}

}  // namespace

void run_observed(const State& initial, const IntegratorConfig& cfg, double T, int sample_every,
                  SpectralWorkspace& ws,
                  const std::function<void(const State&, const DiagnosticsRecord&)>& observer) {
    cfg.validate();
    if (!(T > 0.0)) throw ConfigError("run horizon T must be positive");
    if (sample_every < 1) throw ConfigError("sample_every must be >= 1");
    require_same_shape(initial.u, initial.v, "run");
    check_finite(initial);

    const std::size_t n = step_count(T, cfg.dt);

    // Centered-difference acceleration needs the states one step before and
    // after each sample, so keep a rolling window of three: one backward
    // step seeds the window and one extra forward step closes it at t = T.
    State prev = step_signed(initial, cfg, ws, -cfg.dt);
    State cur = initial;
    for (std::size_t k = 0; k <= n; ++k) {
        State next = step_signed(cur, cfg, ws, cfg.dt);
        if (k % static_cast<std::size_t>(sample_every) == 0 || k == n) {
            Field accel = next.v;
            axpy(-1.0, prev.v, accel);
            for (double& x : accel.values) x /= 2.0 * cfg.dt;
            DiagnosticsRecord rec = make_record(cur, accel, cfg.penalty, ws);
            observer(cur, rec);
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
}

Trajectory run(const State& initial, const IntegratorConfig& cfg, double T, int sample_every,
               SpectralWorkspace& ws) {
    Trajectory traj;
    run_observed(initial, cfg, T, sample_every, ws,
                 [&traj](const State& s, const DiagnosticsRecord& rec) {
                     traj.samples.push_back(s);
                     traj.records.push_back(rec);
                 });
    return traj;
}

}  // namespace biwave
