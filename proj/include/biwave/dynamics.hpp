#ifndef BIWAVE_DYNAMICS_HPP
#define BIWAVE_DYNAMICS_HPP

#include <functional>
#include <vector>

#include "biwave/grid.hpp"
#include "biwave/record.hpp"
#include "biwave/sphere.hpp"
#include "biwave/spectral.hpp"

namespace biwave {

// Position/velocity pair of the second-order flow at time t.
struct State {
    Field u;
    Field v;
    double t = 0.0;
};

enum class Scheme { strang_split, velocity_verlet };
enum class Variant { standard, tangential_laplacian };

struct IntegratorConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::strang_split;
    Variant variant = Variant::standard;
    PenaltyParams penalty;
    bool dealias_variant = false;  // 2/3-rule low pass on the cubic force

    void validate() const;
};

/*
 * Second-order oscillator u_tt + DD u + (1/eps) grad F(u) = 0, split as
 *   (A) linear flow u_tt = -DD u, solved exactly per Fourier mode:
 *       each mode rotates with frequency mu = |xi|^2,
 *         u^ <- cos(mu dt) u^ + sin(mu dt)/mu v^,   (u^ + dt v^ at mu = 0)
 *         v^ <- -mu sin(mu dt) u^ + cos(mu dt) v^;
 *   (B) kick v <- v - dt grad V(u), V = F/eps (+ variant force), exact since
 *       u is frozen during (B).
 * Strang composition kick(dt/2) o drift(dt) o kick(dt/2) is symmetric,
 * time reversible, and second order.  Both (A) and (B) conserve every
 * rotation charge Q_ij = int <v, Lambda_ij u>: the linear flow is diagonal
 * in Fourier and commutes with rotations, and the kick force is radial so
 * <grad F(u), Lambda_ij u> == 0 pointwise.
 */
State linear_propagate(const State& s, double dt, SpectralWorkspace& ws);

// Standard penalty kick: v -= dt/eps * grad F(u).  u and t are unchanged.
State penalty_kick(const State& s, double dt, const PenaltyParams& p);

// Quartic force of the tangential-laplacian variant: Div(|grad u|^2 grad u).
// Enters the flow as u_tt = ... - 2 * variant_force(u).
Field variant_force(const Field& u, SpectralWorkspace& ws, bool dealias = false);

// Right-hand side a = -DD u - (1/eps) grad F(u) [- 2 Div(|grad u|^2 grad u)].
Field acceleration(const Field& u, const IntegratorConfig& cfg, SpectralWorkspace& ws);

State step_strang(const State& s, const IntegratorConfig& cfg, SpectralWorkspace& ws);

// Explicit velocity Verlet on the full right-hand side (cross-check scheme).
State step_verlet(const State& s, const IntegratorConfig& cfg, SpectralWorkspace& ws);

// Largest dt accepted by step_verlet: 1.9 / sqrt(max|xi|^4 + 8/eps).
double verlet_stability_limit(const GridSpec& grid, const PenaltyParams& p);

struct Trajectory {
    std::vector<State> samples;            // every sample_every steps, incl. t=0 and t=T
    std::vector<DiagnosticsRecord> records;
};

/*
 * Integrate to time T = n_steps * dt and sample diagnostics every
 * sample_every steps.  Records need the instantaneous acceleration for the
 * residual observables; it is formed from the same splitting data, never by
 * re-deriving the force at sample time only (centered difference of the
 * three bracketing states, so the reported residual reflects the integrator
 * actually used).  Throws NonFinite (with the time reached) as soon as any
 * state entry stops being finite.
 */
Trajectory run(const State& initial, const IntegratorConfig& cfg, double T,
               int sample_every, SpectralWorkspace& ws);

// Streaming variant of run(): hands each sampled (state, record) pair to the
// observer as soon as it is formed, so callers can flush output incrementally
// and keep the last finite state when a later step blows up.
void run_observed(const State& initial, const IntegratorConfig& cfg, double T, int sample_every,
                  SpectralWorkspace& ws,
                  const std::function<void(const State&, const DiagnosticsRecord&)>& observer);

}  // namespace biwave

#endif
