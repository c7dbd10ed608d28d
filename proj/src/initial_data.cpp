#include "biwave/initial_data.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <string>

#include "biwave/errors.hpp"
#include "biwave/sphere.hpp"

namespace biwave {

namespace {

/*
 * Gaussian stream with its own Box-Muller transform over mt19937_64.
 * std::normal_distribution is implementation-defined, so it cannot back a
 * bit-reproducibility contract; the raw engine output is pinned by the
 * standard and the transform below is fixed arithmetic.
 */
class GaussianSource {
  public:
    explicit GaussianSource(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
        const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;          // [0,1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct Mode {
    int m0 = 0;
    int m1 = 0;  // unused for one axis
};

// Half-lattice of nonzero integer modes up to max_mode per axis (one member
// of each +-m pair; the cos/sin pair spans both signs).
std::vector<Mode> mode_list(int dim, int max_mode) {
    std::vector<Mode> modes;
    if (dim == 1) {
        for (int m = 1; m <= max_mode; ++m) modes.push_back({m, 0});
    } else {
        for (int m0 = 0; m0 <= max_mode; ++m0)
            for (int m1 = -max_mode; m1 <= max_mode; ++m1) {
                if (m0 == 0 && m1 <= 0) continue;
                modes.push_back({m0, m1});
            }
    }
    return modes;
}

/*
 * Band-limited ambient perturbation around e_1, evaluated pointwise as an
 * explicit trigonometric sum.  Coefficients are drawn in a grid-independent
 * order (component-major, then mode), and the node coordinate enters only
 * through i/N = x/L, so two grids sampling the same torus see the same
 * continuum field wherever their nodes coincide.
 */
Field synthesize_ambient(const GridSpec& grid, int ambient_dim, int max_mode, double amplitude,
                         GaussianSource& gauss) {
    const std::vector<Mode> modes = mode_list(grid.dim, max_mode);
    const double sigma = modes.empty() ? 0.0 : amplitude / std::sqrt(static_cast<double>(modes.size()));

    std::vector<std::vector<double>> coef_cos(ambient_dim), coef_sin(ambient_dim);
    for (int c = 0; c < ambient_dim; ++c) {
        coef_cos[c].resize(modes.size());
        coef_sin[c].resize(modes.size());
        for (std::size_t m = 0; m < modes.size(); ++m) {
            coef_cos[c][m] = sigma * gauss.next();
            coef_sin[c][m] = sigma * gauss.next();
        }
    }

    Field w(grid, ambient_dim);
    const int n0 = grid.points[0];
    const int n1 = grid.dim == 2 ? grid.points[1] : 1;
    const double two_pi = 2.0 * std::numbers::pi;

    std::size_t pt = 0;
    for (int i0 = 0; i0 < n0; ++i0) {
        const double f0 = static_cast<double>(i0) / n0;
        for (int i1 = 0; i1 < n1; ++i1, ++pt) {
            const double f1 = static_cast<double>(i1) / n1;
            for (int c = 0; c < ambient_dim; ++c) {
                double val = (c == 0) ? 1.0 : 0.0;
                for (std::size_t m = 0; m < modes.size(); ++m) {
                    const double angle =
                        two_pi * (modes[m].m0 * f0 + (grid.dim == 2 ? modes[m].m1 * f1 : 0.0));
                    val += coef_cos[c][m] * std::cos(angle) + coef_sin[c][m] * std::sin(angle);
                }
                w.values[pt * ambient_dim + c] = val;
            }
        }
    }
    return w;
}

using Bits = std::vector<std::uint64_t>;

Bits to_bits(std::span<const double> y) {
    Bits b(y.size());
    std::memcpy(b.data(), y.data(), y.size() * sizeof(double));
    return b;
}

/*
 * Drive a pointwise map to a floating-point fixed point.  A single
 * application of y -> y/|y| (or of the tangent projection) leaves last-bit
 * residue that a second application would still move, so `prepare` iterates
 * until the output stops changing; a 2-cycle, should rounding produce one,
 * is broken by picking the bitwise-smaller member, which is the same choice
 * on every future visit.  This is what makes prepare(prepare(x)) == prepare(x)
 * hold bit for bit.
 */
template <typename MapFn>
void fixed_point(std::span<double> y, const MapFn& map) {
    std::vector<double> next(y.size());
    Bits prev_bits;
    for (int iter = 0; iter < 32; ++iter) {
        map(std::span<const double>(y.data(), y.size()), std::span<double>(next.data(), next.size()));
        const Bits cur_bits = to_bits(std::span<const double>(y.data(), y.size()));
        const Bits next_bits = to_bits(std::span<const double>(next.data(), next.size()));
        if (next_bits == cur_bits) return;
        if (iter > 0 && next_bits == prev_bits) {
            if (next_bits < cur_bits) std::copy(next.begin(), next.end(), y.begin());
            return;
        }
        prev_bits = cur_bits;
        std::copy(next.begin(), next.end(), y.begin());
    }
}

}  // namespace

State great_circle_wave(const GridSpec& grid, const std::vector<int>& wave_index, double omega,
                        const std::vector<double>& p1, const std::vector<double>& p2,
                        double phase) {
    grid.validate();
    if (static_cast<int>(wave_index.size()) != grid.dim)
        throw ShapeMismatch("great_circle_wave: one integer wave index per axis required");
    if (p1.size() != p2.size() || p1.size() < 2)
        throw NonOrthonormalPlane("great_circle_wave: plane vectors must share a dimension >= 2");

    double n1 = 0.0, n2 = 0.0, dot = 0.0;
    for (std::size_t k = 0; k < p1.size(); ++k) {
        n1 += p1[k] * p1[k];
        n2 += p2[k] * p2[k];
        dot += p1[k] * p2[k];
    }
    if (std::abs(n1 - 1.0) > 1e-12 || std::abs(n2 - 1.0) > 1e-12 || std::abs(dot) > 1e-12)
        throw NonOrthonormalPlane("great_circle_wave: plane vectors not orthonormal to 1e-12");

    const int ambient = static_cast<int>(p1.size());
    State s;
    s.u = Field(grid, ambient);
    s.v = Field(grid, ambient);
    s.t = 0.0;

    const double two_pi = 2.0 * std::numbers::pi;
    const int n_0 = grid.points[0];
    const int n_1 = grid.dim == 2 ? grid.points[1] : 1;

    std::size_t pt = 0;
    for (int i0 = 0; i0 < n_0; ++i0) {
        for (int i1 = 0; i1 < n_1; ++i1, ++pt) {
            double theta = phase + two_pi * wave_index[0] * (static_cast<double>(i0) / n_0);
            if (grid.dim == 2)
                theta += two_pi * wave_index[1] * (static_cast<double>(i1) / n_1);
            const double co = std::cos(theta), si = std::sin(theta);
            for (int c = 0; c < ambient; ++c) {
                // u = cos(theta - w t) p1 + sin(theta - w t) p2 at t = 0.
                s.u.values[pt * ambient + c] = co * p1[c] + si * p2[c];
                s.v.values[pt * ambient + c] = omega * (si * p1[c] - co * p2[c]);
            }
        }
    }
    return s;
}

Field random_sphere_field(const GridSpec& grid, int ambient_dim, int max_mode, double amplitude,
                          std::uint64_t seed) {
    grid.validate();
    if (ambient_dim < 2) throw ShapeMismatch("random_sphere_field: ambient dimension must be >= 2");
    int min_n = grid.points[0];
    for (int a = 1; a < grid.dim; ++a) min_n = std::min(min_n, grid.points[a]);
    if (!(max_mode >= 0) || 3 * max_mode >= min_n)
        throw ShapeMismatch("random_sphere_field: need max_mode < min(points)/3");

    GaussianSource gauss(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Field w = synthesize_ambient(grid, ambient_dim, max_mode, amplitude, gauss);
        try {
            return project_sphere(w);
        } catch (const DegenerateVector&) {
            // Perturbation crossed the origin somewhere; redraw (the source
            // keeps advancing, so retries stay deterministic in the seed).
        }
    }
    throw DegenerateVector("random_sphere_field: 100 draws all passed near the origin");
}

Field random_tangent_field(const Field& u, int max_mode, double amplitude, std::uint64_t seed) {
    int min_n = u.grid.points[0];
    for (int a = 1; a < u.grid.dim; ++a) min_n = std::min(min_n, u.grid.points[a]);
    if (!(max_mode >= 0) || 3 * max_mode >= min_n)
        throw ShapeMismatch("random_tangent_field: need max_mode < min(points)/3");
    GaussianSource gauss(seed);
    Field w = synthesize_ambient(u.grid, u.components, max_mode, amplitude, gauss);
    // Remove the e_1 offset: a velocity needs no preferred mean direction.
    for (std::size_t pt = 0; pt < w.num_points(); ++pt) w.values[pt * w.components] -= 1.0;
    return project_tangent(u, w);
}

State prepare(const Field& u0_raw, const Field& u1_raw, std::optional<int> smooth_modes) {
    require_same_shape(u0_raw, u1_raw, "prepare");

    State s;
    s.u = u0_raw;
    s.v = u1_raw;
    s.t = 0.0;

    if (smooth_modes) {
        SpectralWorkspace ws(u0_raw.grid);
        truncate_modes(s.u, *smooth_modes, ws);
        truncate_modes(s.v, *smooth_modes, ws);
    }

    const int c = s.u.components;
    for (std::size_t pt = 0; pt < s.u.num_points(); ++pt) {
        std::span<double> y(s.u.values.data() + pt * c, c);
        fixed_point(y, [](std::span<const double> in, std::span<double> out) {
            project_sphere(in, out);
        });
    }
    for (std::size_t pt = 0; pt < s.v.num_points(); ++pt) {
        std::span<const double> base(s.u.values.data() + pt * c, c);
        std::span<double> w(s.v.values.data() + pt * c, c);
        fixed_point(w, [base](std::span<const double> in, std::span<double> out) {
            project_tangent(base, in, out);
        });
    }
    return s;
}

}  // namespace biwave
