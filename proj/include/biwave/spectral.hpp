#ifndef BIWAVE_SPECTRAL_HPP
#define BIWAVE_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "biwave/grid.hpp"

namespace biwave {

/*
 * Fourier-side machinery for periodic derivatives.
 *
 * Real-to-complex transforms store the non-negative half of the last axis:
 * spectrum index s runs over k_0 x ... x k_{d-2} x {0..N_{d-1}/2}.  The
 * wavenumber of integer mode k on axis a is xi_a = 2*pi*k_a / L_a with
 * k_a in (-N_a/2, N_a/2].  For odd-order derivatives the Nyquist mode
 * k_a = N_a/2 has no consistent sign on a real grid, so its first-derivative
 * multiplier is zeroed; even powers |xi|^2, |xi|^4 keep it.
 *
 * One workspace owns the FFTW plans and scratch for one grid.  It is not
 * re-entrant: use one workspace per thread.  Plans are created with
 * FFTW_ESTIMATE so planning never depends on runtime measurement, keeping
 * results reproducible bit for bit across runs.
 */
class SpectralWorkspace {
  public:
    explicit SpectralWorkspace(const GridSpec& grid);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const GridSpec& grid() const { return grid_; }
    std::size_t spectrum_size() const { return spec_size_; }

    // Transform component c of f into the internal spectrum buffer.
    void forward(const Field& f, int c);
    // Inverse-transform the internal spectrum buffer into component c of f,
    // including the 1/prod(N) normalization.  Destroys the buffer contents.
    void inverse(Field& f, int c);

    std::complex<double>* spectrum() { return spec_view_; }
    const std::complex<double>* spectrum() const { return spec_view_; }

    // |xi|^2 per spectrum entry.
    const std::vector<double>& xi_squared() const { return xi2_; }
    // xi_a per spectrum entry with the Nyquist ambiguity zeroed (odd orders).
    const std::vector<double>& xi_odd(int axis) const { return xi_odd_[axis]; }
    // Integer mode magnitude |k_a| per spectrum entry (for low-pass masks).
    const std::vector<int>& mode_abs(int axis) const { return mode_abs_[axis]; }

    // Persistent complex scratch arrays sized spectrum_size() for callers
    // that need several spectra alive at once.
    std::vector<std::complex<double>>& scratch_a() { return scratch_a_; }
    std::vector<std::complex<double>>& scratch_b() { return scratch_b_; }

  private:
    GridSpec grid_;
    std::size_t spec_size_ = 0;
    double* real_buf_ = nullptr;
    void* cplx_buf_ = nullptr;  // fftw_complex*, kept opaque here
    std::complex<double>* spec_view_ = nullptr;
    void* plan_fwd_ = nullptr;  // fftw_plan
    void* plan_bwd_ = nullptr;
    std::vector<double> xi2_;
    std::vector<std::vector<double>> xi_odd_;
    std::vector<std::vector<int>> mode_abs_;
    std::vector<std::complex<double>> scratch_a_, scratch_b_;
};

// Component-wise periodic derivatives.  All are exact on band-limited fields
// up to rounding; each routine does one forward transform per component.
std::vector<Field> gradient(const Field& f, SpectralWorkspace& ws);   // d fields
Field derivative(const Field& f, int axis, SpectralWorkspace& ws);
Field laplacian(const Field& f, SpectralWorkspace& ws);
Field bilaplacian(const Field& f, SpectralWorkspace& ws);             // |xi|^4 in one pass
Field divergence(const std::vector<Field>& w, SpectralWorkspace& ws); // sum_a d_a w_a

// Div of the vector field with components <p, q_a>: sum_a d_a <p, q[a]>.
Field div_contraction(const Field& p, const std::vector<Field>& q, SpectralWorkspace& ws);

// Same with a pointwise linear twist applied to each q[a] before contracting
// (e.g. a skew rotation, giving sum_a d_a <p, Lambda q[a]>).
using PointwiseMap = std::function<void(std::span<const double>, std::span<double>)>;
Field div_contraction(const Field& p, const std::vector<Field>& q, SpectralWorkspace& ws,
                      const PointwiseMap& twist);

// Zero all modes with |k_a| > points[a]/3 on any axis (2/3-rule low pass).
void low_pass_two_thirds(Field& f, SpectralWorkspace& ws);
// Zero all modes with |k_a| > max_mode on any axis.
void truncate_modes(Field& f, int max_mode, SpectralWorkspace& ws);

}  // namespace biwave

#endif
