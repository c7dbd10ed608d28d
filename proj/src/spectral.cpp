#include "biwave/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace biwave {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const GridSpec& grid) : grid_(grid) {
    grid_.validate();
    const int d = grid_.dim;
    std::size_t spec = 1;
    for (int a = 0; a < d - 1; ++a) spec *= static_cast<std::size_t>(grid_.points[a]);
    spec *= static_cast<std::size_t>(grid_.points[d - 1] / 2 + 1);
    spec_size_ = spec;

    real_buf_ = fftw_alloc_real(grid_.num_points());
    fftw_complex* cbuf = fftw_alloc_complex(spec_size_);
    cplx_buf_ = cbuf;
    spec_view_ = reinterpret_cast<std::complex<double>*>(cbuf);

    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        // FFTW_ESTIMATE: planning is input-independent, so repeated runs of
        // the same configuration produce bit-identical transforms.
        if (d == 1) {
            plan_fwd_ = fftw_plan_dft_r2c_1d(grid_.points[0], real_buf_, cbuf, FFTW_ESTIMATE);
            plan_bwd_ = fftw_plan_dft_c2r_1d(grid_.points[0], cbuf, real_buf_, FFTW_ESTIMATE);
        } else {
            plan_fwd_ = fftw_plan_dft_r2c_2d(grid_.points[0], grid_.points[1], real_buf_, cbuf,
                                             FFTW_ESTIMATE);
            plan_bwd_ = fftw_plan_dft_c2r_2d(grid_.points[0], grid_.points[1], cbuf, real_buf_,
                                             FFTW_ESTIMATE);
        }
    }

    xi2_.assign(spec_size_, 0.0);
    xi_odd_.assign(d, std::vector<double>(spec_size_, 0.0));
    mode_abs_.assign(d, std::vector<int>(spec_size_, 0));

    const int last = d - 1;
    const int nlast = grid_.points[last] / 2 + 1;
    for (std::size_t s = 0; s < spec_size_; ++s) {
        std::size_t rem = s;
        for (int a = d - 1; a >= 0; --a) {
            int idx;
            if (a == last) {
                idx = static_cast<int>(rem % nlast);
                rem /= nlast;
            } else {
                idx = static_cast<int>(rem % grid_.points[a]);
                rem /= grid_.points[a];
            }
            // Signed integer mode: indices above N/2 alias to negative modes.
            int k = (idx <= grid_.points[a] / 2) ? idx : idx - grid_.points[a];
            const double xi = 2.0 * std::numbers::pi * k / grid_.lengths[a];
            xi2_[s] += xi * xi;
            mode_abs_[a][s] = std::abs(k);
            // k = N/2 has no signed counterpart on a real grid: first
            // derivatives of real data would turn complex, so odd-order
            // multipliers drop it.
            xi_odd_[a][s] = (std::abs(k) == grid_.points[a] / 2) ? 0.0 : xi;
        }
    }

    scratch_a_.assign(spec_size_, {0.0, 0.0});
    scratch_b_.assign(spec_size_, {0.0, 0.0});
}

SpectralWorkspace::~SpectralWorkspace() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    if (real_buf_) fftw_free(real_buf_);
    if (cplx_buf_) fftw_free(static_cast<fftw_complex*>(cplx_buf_));
}

void SpectralWorkspace::forward(const Field& f, int c) {
    if (!(f.grid == grid_)) throw ShapeMismatch("spectral: field grid does not match workspace");
    if (c < 0 || c >= f.components) throw ShapeMismatch("spectral: component out of range");
    const std::size_t np = grid_.num_points();
    const int comps = f.components;
    for (std::size_t p = 0; p < np; ++p) real_buf_[p] = f.values[p * comps + c];
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}

void SpectralWorkspace::inverse(Field& f, int c) {
    if (!(f.grid == grid_)) throw ShapeMismatch("spectral: field grid does not match workspace");
    if (c < 0 || c >= f.components) throw ShapeMismatch("spectral: component out of range");
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const std::size_t np = grid_.num_points();
    const double norm = 1.0 / static_cast<double>(np);
    const int comps = f.components;
    for (std::size_t p = 0; p < np; ++p) f.values[p * comps + c] = real_buf_[p] * norm;
}

namespace {

// out_c = inverse(mult .* forward(f_c)) for a real multiplier.
Field apply_real_multiplier(const Field& f, const std::vector<double>& mult,
                            SpectralWorkspace& ws) {
    Field out(f.grid, f.components);
    std::complex<double>* spec = ws.spectrum();
    for (int c = 0; c < f.components; ++c) {
        ws.forward(f, c);
        for (std::size_t s = 0; s < ws.spectrum_size(); ++s) spec[s] *= mult[s];
        ws.inverse(out, c);
    }
    return out;
}

}  // namespace

std::vector<Field> gradient(const Field& f, SpectralWorkspace& ws) {
    const int d = f.grid.dim;
    std::vector<Field> out;
    out.reserve(d);
    for (int a = 0; a < d; ++a) out.emplace_back(f.grid, f.components);

    std::complex<double>* spec = ws.spectrum();
    auto& saved = ws.scratch_a();
    for (int c = 0; c < f.components; ++c) {
        ws.forward(f, c);
        saved.assign(spec, spec + ws.spectrum_size());
        for (int a = 0; a < d; ++a) {
            const auto& xi = ws.xi_odd(a);
            for (std::size_t s = 0; s < ws.spectrum_size(); ++s)
                spec[s] = std::complex<double>(0.0, xi[s]) * saved[s];
            ws.inverse(out[a], c);
        }
    }
    return out;
}

Field derivative(const Field& f, int axis, SpectralWorkspace& ws) {
    if (axis < 0 || axis >= f.grid.dim) throw ShapeMismatch("derivative: axis out of range");
    Field out(f.grid, f.components);
    std::complex<double>* spec = ws.spectrum();
    const auto& xi = ws.xi_odd(axis);
    for (int c = 0; c < f.components; ++c) {
        ws.forward(f, c);
        for (std::size_t s = 0; s < ws.spectrum_size(); ++s)
            spec[s] = std::complex<double>(0.0, xi[s]) * spec[s];
        ws.inverse(out, c);
    }
    return out;
}

Field laplacian(const Field& f, SpectralWorkspace& ws) {
    std::vector<double> mult(ws.spectrum_size());
    const auto& xi2 = ws.xi_squared();
    for (std::size_t s = 0; s < mult.size(); ++s) mult[s] = -xi2[s];
    return apply_real_multiplier(f, mult, ws);
}

Field bilaplacian(const Field& f, SpectralWorkspace& ws) {
    std::vector<double> mult(ws.spectrum_size());
    const auto& xi2 = ws.xi_squared();
    for (std::size_t s = 0; s < mult.size(); ++s) mult[s] = xi2[s] * xi2[s];
    return apply_real_multiplier(f, mult, ws);
}

Field divergence(const std::vector<Field>& w, SpectralWorkspace& ws) {
    if (static_cast<int>(w.size()) != ws.grid().dim)
        throw ShapeMismatch("divergence: need one field per axis");
    Field out(w[0].grid, w[0].components);
    Field term(w[0].grid, w[0].components);
    std::complex<double>* spec = ws.spectrum();
    for (int a = 0; a < ws.grid().dim; ++a) {
        require_same_shape(w[a], out, "divergence");
        const auto& xi = ws.xi_odd(a);
        for (int c = 0; c < out.components; ++c) {
            ws.forward(w[a], c);
            for (std::size_t s = 0; s < ws.spectrum_size(); ++s)
                spec[s] = std::complex<double>(0.0, xi[s]) * spec[s];
            ws.inverse(term, c);
        }
        axpy(1.0, term, out);
    }
    return out;
}

Field div_contraction(const Field& p, const std::vector<Field>& q, SpectralWorkspace& ws) {
    if (static_cast<int>(q.size()) != ws.grid().dim)
        throw ShapeMismatch("div_contraction: need one field per axis");
    std::vector<Field> contracted;
    contracted.reserve(q.size());
    for (const Field& qa : q) contracted.push_back(pointwise_dot(p, qa));
    return divergence(contracted, ws);
}

Field div_contraction(const Field& p, const std::vector<Field>& q, SpectralWorkspace& ws,
                      const PointwiseMap& twist) {
    if (static_cast<int>(q.size()) != ws.grid().dim)
        throw ShapeMismatch("div_contraction: need one field per axis");
    std::vector<Field> contracted;
    contracted.reserve(q.size());
    const std::size_t np = p.num_points();
    const int comps = p.components;
    std::vector<double> tw(comps);
    for (const Field& qa : q) {
        require_same_shape(p, qa, "div_contraction");
        Field s(p.grid, 1);
        for (std::size_t pt = 0; pt < np; ++pt) {
            twist(std::span<const double>(qa.values.data() + pt * comps, comps),
                  std::span<double>(tw.data(), comps));
            double acc = 0.0;
            for (int c = 0; c < comps; ++c) acc += p.values[pt * comps + c] * tw[c];
            s.values[pt] = acc;
        }
        contracted.push_back(std::move(s));
    }
    return divergence(contracted, ws);
}

namespace {

void zero_masked_modes(Field& f, SpectralWorkspace& ws, const std::vector<char>& kill) {
    std::complex<double>* spec = ws.spectrum();
    for (int c = 0; c < f.components; ++c) {
        ws.forward(f, c);
        for (std::size_t s = 0; s < ws.spectrum_size(); ++s)
            if (kill[s]) spec[s] = {0.0, 0.0};
        ws.inverse(f, c);
    }
}

}  // namespace

void low_pass_two_thirds(Field& f, SpectralWorkspace& ws) {
    std::vector<char> kill(ws.spectrum_size(), 0);
    for (int a = 0; a < ws.grid().dim; ++a) {
        const int cutoff = ws.grid().points[a] / 3;
        const auto& mode = ws.mode_abs(a);
        for (std::size_t s = 0; s < kill.size(); ++s)
            if (mode[s] > cutoff) kill[s] = 1;
    }
    zero_masked_modes(f, ws, kill);
}

void truncate_modes(Field& f, int max_mode, SpectralWorkspace& ws) {
    std::vector<char> kill(ws.spectrum_size(), 0);
    for (int a = 0; a < ws.grid().dim; ++a) {
        const auto& mode = ws.mode_abs(a);
        for (std::size_t s = 0; s < kill.size(); ++s)
            if (mode[s] > max_mode) kill[s] = 1;
    }
    zero_masked_modes(f, ws, kill);
}

}  // namespace biwave
