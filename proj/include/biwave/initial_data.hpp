#ifndef BIWAVE_INITIAL_DATA_HPP
#define BIWAVE_INITIAL_DATA_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "biwave/dynamics.hpp"
#include "biwave/grid.hpp"

namespace biwave {

/*
 * Traveling great-circle wave in the orthonormal plane span{p1, p2}:
 *   u(x, t) = cos(k.x - omega t + phase) p1 + sin(k.x - omega t + phase) p2,
 * sampled at t = 0 together with its exact velocity.  k is the integer wave
 * index per axis (physical wavenumber 2*pi*k_a/L_a).  Exactly sphere-valued;
 * an exact solution of the linear biharmonic wave flow when omega = |k_phys|^2,
 * and of the penalized flow for every penalty strength (the force vanishes on
 * the sphere).  Throws NonOrthonormalPlane if p1, p2 are not orthonormal to
 * 1e-12.
 */
State great_circle_wave(const GridSpec& grid, const std::vector<int>& wave_index,
                        double omega, const std::vector<double>& p1,
                        const std::vector<double>& p2, double phase = 0.0);

/*
 * Random smooth sphere-valued field.  A band-limited ambient perturbation of
 * the north pole e_1 is synthesized as an explicit trigonometric sum with
 * Gaussian coefficients (own Box-Muller over mt19937_64 so the stream is
 * identical on every platform), then retracted pointwise onto the sphere.
 * The sum is evaluated pointwise in x, so the underlying continuum field
 * depends only on (seed, max_mode, amplitude, ambient_dim, lengths) and not
 * on the grid resolution: refining the grid samples the same function.
 * Requires 3 * max_mode < min_a points[a] so the retracted field stays well
 * resolved.  Coefficients are rescaled so the pre-projection perturbation has
 * unit-component RMS amplitude `amplitude`.
 */
Field random_sphere_field(const GridSpec& grid, int ambient_dim, int max_mode,
                          double amplitude, std::uint64_t seed);

// Tangent velocity field along u: band-limited random ambient field (same
// synthesis as above, derived seed stream) projected onto T_u S pointwise.
Field random_tangent_field(const Field& u, int max_mode, double amplitude,
                           std::uint64_t seed);

/*
 * Normalize raw data into admissible initial data for the penalized flow:
 * optional spectral truncation of both fields to |k_a| <= smooth_modes,
 * pointwise retraction of u0 onto the sphere, and pointwise tangential
 * projection of u1 along the retracted u0.  Already-admissible data is returned bit
 * identically (the retraction and projection are exact no-ops then).
 */
State prepare(const Field& u0_raw, const Field& u1_raw,
              std::optional<int> smooth_modes = std::nullopt);

}  // namespace biwave

#endif
