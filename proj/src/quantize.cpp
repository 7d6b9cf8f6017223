#include "pdo/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdo/bump.hpp"
#include "pdo/detail/blocks.hpp"
#include "pdo/detail/fft.hpp"
#include "pdo/error.hpp"
#include "pdo/fourier.hpp"
#include "pdo/rng.hpp"
#include "pdo/test_functions.hpp"

namespace pdo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double transform_scale(int n) { return std::pow(kTwoPi, -0.5 * n); }

void check_symbol_grids(const GridSpec& gx, const GridSpec& gxi, int ka, const ModuleFunction& phi) {
    if (!(gx == phi.grid())) throw ShapeError("symbol x-grid differs from the function grid");
    if (!(gxi == phi.grid().dual())) throw ShapeError("symbol xi-grid is not the dual of the function grid");
    if (ka != phi.k()) throw ShapeError("symbol and function have different algebra dimensions");
}

// table[j * N + m] = e^{i x_j xi_m} for one axis of the grid and its dual.
std::vector<Complex> phase_table(const GridSpec& gx, const GridSpec& gxi, double sign) {
    const int N = gx.points_per_axis();
    const int M = gxi.points_per_axis();
    std::vector<Complex> t(static_cast<std::size_t>(N) * M);
    for (int j = 0; j < N; ++j)
        for (int m = 0; m < M; ++m)
            t[static_cast<std::size_t>(j) * M + m] = std::polar(1.0, sign * gx.coordinate(j) * gxi.coordinate(m));
    return t;
}

// Phases e^{sign i x.xi} for a fixed x (multi-index idx) over the whole xi grid.
void phase_row(const std::vector<Complex>& table, const GridSpec& gxi, int n, const std::array<int, kMaxDim>& idx,
               std::vector<Complex>& row) {
    const std::size_t M = static_cast<std::size_t>(gxi.points_per_axis());
    const Complex* t0 = table.data() + static_cast<std::size_t>(idx[0]) * M;
    if (n == 1) {
        std::copy(t0, t0 + M, row.begin());
        return;
    }
    const Complex* t1 = table.data() + static_cast<std::size_t>(idx[1]) * M;
    for (std::size_t m0 = 0; m0 < M; ++m0)
        for (std::size_t m1 = 0; m1 < M; ++m1) row[m0 * M + m1] = t0[m0] * t1[m1];
}

ModuleFunction tag_by_decay(ModuleFunction f) {
    return f.with_decay(f.satisfies_decay() ? DecayClass::schwartz : DecayClass::bounded);
}

// Sum over the dual grid for every x. `at(ix, ixi)` returns a pointer to the
// k x k symbol block.
template <class SymbolAt>
ModuleFunction apply_core(const GridSpec& gx, int k, const ModuleFunction& phi_hat, SymbolAt&& at, SymbolSide side) {
    const GridSpec& gxi = phi_hat.grid();
    const int n = gx.n();
    const std::size_t bs = static_cast<std::size_t>(k) * k;
    const auto table = phase_table(gx, gxi, 1.0);
    std::vector<Complex> row(gxi.size());
    ModuleFunction out(gx, k, DecayClass::bounded);
    const double scale = transform_scale(n) * gxi.cell_volume();
    for (std::size_t ix = 0; ix < gx.size(); ++ix) {
        phase_row(table, gxi, n, gx.multi_index(ix), row);
        Complex* acc = out.block(ix).data();
        for (std::size_t ixi = 0; ixi < gxi.size(); ++ixi) {
            const Complex* s = at(ix, ixi);
            const Complex* v = phi_hat.values().data() + ixi * bs;
            if (side == SymbolSide::left)
                detail::mul_add(acc, s, v, k, row[ixi]);
            else
                detail::mul_add(acc, v, s, k, row[ixi]);
        }
        for (std::size_t c = 0; c < bs; ++c) acc[c] *= scale;
    }
    return out;
}

ModuleFunction apply_sampled(const SampledSymbol& a, const ModuleFunction& phi, SymbolSide side) {
    const auto phi_hat = fourier_unchecked(phi, DecayClass::schwartz);
    const std::size_t bs = a.block_size();
    const Complex* base = a.values().data();
    const std::size_t nxi = a.grid_xi().size();
    return apply_core(a.grid_x(), a.k(), phi_hat,
                      [&](std::size_t ix, std::size_t ixi) { return base + (ix * nxi + ixi) * bs; }, side);
}

// Frobenius-type L2 norm over all matrix entries; the operator acts
// column by column, so this is the norm of the direct sum of k copies of
// L2(R^n, C^k).
double entry_norm(const ModuleFunction& f) {
    double s = 0.0;
    for (const Complex& v : f.values()) s += std::norm(v);
    return std::sqrt(s * f.grid().cell_volume());
}

// ---- finite differences on the phase-space sample array

struct Layout {
    int rank = 0;
    std::array<int, 2 * kMaxDim> dims{};
    std::array<double, 2 * kMaxDim> steps{};
    std::array<std::size_t, 2 * kMaxDim> strides{};
    std::size_t total = 0;
};

Layout layout_of(const SampledSymbol& a) {
    Layout l;
    const int n = a.grid_x().n();
    l.rank = 2 * n;
    for (int j = 0; j < n; ++j) {
        l.dims[static_cast<std::size_t>(j)] = a.grid_x().points_per_axis();
        l.steps[static_cast<std::size_t>(j)] = a.grid_x().spacing();
        l.dims[static_cast<std::size_t>(n + j)] = a.grid_xi().points_per_axis();
        l.steps[static_cast<std::size_t>(n + j)] = a.grid_xi().spacing();
    }
    std::size_t stride = 1;
    for (int ax = l.rank - 1; ax >= 0; --ax) {
        l.strides[static_cast<std::size_t>(ax)] = stride;
        stride *= static_cast<std::size_t>(l.dims[static_cast<std::size_t>(ax)]);
    }
    l.total = stride;
    return l;
}

void require_resolution(const Layout& l, const char* op) {
    for (int ax = 0; ax < l.rank; ++ax)
        if (l.dims[static_cast<std::size_t>(ax)] < 8)
            throw ResolutionError(std::string(op) + ": at least 8 points per axis are required");
}

// order 1: centered (f+ - f-)/2h, one-sided (-3f0 + 4f1 - f2)/2h at edges.
// order 2: (f+ - 2f + f-)/h^2, one-sided (2f0 - 5f1 + 4f2 - f3)/h^2 at edges.
std::vector<Complex> differentiate(const std::vector<Complex>& f, const Layout& l, int axis, std::size_t bs,
                                   int order) {
    const auto a = static_cast<std::size_t>(axis);
    const std::size_t st = l.strides[a] * bs;
    const int N = l.dims[a];
    const double h = l.steps[a];
    std::vector<Complex> out(f.size());
    for (std::size_t s = 0; s < l.total; ++s) {
        const int i = static_cast<int>((s / l.strides[a]) % static_cast<std::size_t>(N));
        const Complex* p = f.data() + s * bs;
        Complex* o = out.data() + s * bs;
        for (std::size_t c = 0; c < bs; ++c) {
            const Complex* q = p + c;
            Complex d;
            if (order == 1) {
                if (i == 0)
                    d = (-3.0 * q[0] + 4.0 * q[st] - q[2 * st]) / (2.0 * h);
                else if (i == N - 1)
                    d = (3.0 * q[0] - 4.0 * q[-static_cast<std::ptrdiff_t>(st)] +
                         q[-static_cast<std::ptrdiff_t>(2 * st)]) /
                        (2.0 * h);
                else
                    d = (q[st] - q[-static_cast<std::ptrdiff_t>(st)]) / (2.0 * h);
            } else {
                if (i == 0)
                    d = (2.0 * q[0] - 5.0 * q[st] + 4.0 * q[2 * st] - q[3 * st]) / (h * h);
                else if (i == N - 1) {
                    const auto m = static_cast<std::ptrdiff_t>(st);
                    d = (2.0 * q[0] - 5.0 * q[-m] + 4.0 * q[-2 * m] - q[-3 * m]) / (h * h);
                } else
                    d = (q[st] - 2.0 * q[0] + q[-static_cast<std::ptrdiff_t>(st)]) / (h * h);
            }
            o[c] = d;
        }
    }
    return out;
}

double block_sup(const std::vector<Complex>& f, std::size_t bs, int k) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); i += bs)
        m = std::max(m, cstar_norm(std::span<const Complex>(f.data() + i, bs), k));
    return m;
}

void seminorm_walk(const std::vector<Complex>& f, const Layout& l, int axis, std::size_t bs, int k, double& best) {
    if (axis == l.rank) {
        best = std::max(best, block_sup(f, bs, k));
        return;
    }
    seminorm_walk(f, l, axis + 1, bs, k, best);
    seminorm_walk(differentiate(f, l, axis, bs, 1), l, axis + 1, bs, k, best);
}

// ---- adjoint symbol machinery

double fft_frequency(int idx, int M, double h) {
    const int k = idx < M / 2 ? idx : idx - M;
    return kTwoPi * k / (M * h);
}

// Multiplier of the damped kernel (2 pi)^{-n} e^{-i z.eta - eps(|z|^2+|eta|^2)}
// for one (x_j, xi_j) axis pair in the discrete Fourier domain.
std::vector<Complex> pair_multiplier(int Mx, double hx, int Mxi, double hxi, double eps) {
    std::vector<Complex> t(static_cast<std::size_t>(Mx) * Mxi);
    const double d = 1.0 + 4.0 * eps * eps;
    const double pre = 1.0 / std::sqrt(d);
    for (int i = 0; i < Mx; ++i) {
        const double s = fft_frequency(i, Mx, hx);
        for (int j = 0; j < Mxi; ++j) {
            const double tt = fft_frequency(j, Mxi, hxi);
            const double mag = pre * std::exp(-eps * (s * s + tt * tt) / d);
            t[static_cast<std::size_t>(i) * Mxi + j] = std::polar(mag, s * tt / d);
        }
    }
    return t;
}

class AdjointWorkspace {
public:
    AdjointWorkspace(const SampledSymbol& a, int pad_factor) : a_(a), l_(layout_of(a)), pad_(pad_factor) {
        if (pad_factor < 1) throw InvalidInput("pad factor must be at least 1");
        pdims_.resize(static_cast<std::size_t>(l_.rank));
        ptotal_ = 1;
        for (int ax = 0; ax < l_.rank; ++ax) {
            pdims_[static_cast<std::size_t>(ax)] = pad_ * l_.dims[static_cast<std::size_t>(ax)];
            ptotal_ *= static_cast<std::size_t>(pdims_[static_cast<std::size_t>(ax)]);
        }
    }

    std::size_t padded_size() const noexcept { return ptotal_; }
    const Layout& layout() const noexcept { return l_; }

    // Forward transform of the padded conjugate of entry (r, c) of a.
    std::vector<Complex> padded_spectrum(int r, int c) const {
        const int k = a_.k();
        const std::size_t bs = a_.block_size();
        const std::size_t entry = static_cast<std::size_t>(r + c * k);
        const bool zero_pad = a_.decay_class() == DecayClass::schwartz;
        std::vector<Complex> buf(ptotal_);
        std::array<int, 2 * kMaxDim> pidx{};
        for (std::size_t s = 0; s < ptotal_; ++s) {
            std::size_t rem = s;
            for (int ax = l_.rank - 1; ax >= 0; --ax) {
                const auto u = static_cast<std::size_t>(ax);
                pidx[u] = static_cast<int>(rem % static_cast<std::size_t>(pdims_[u]));
                rem /= static_cast<std::size_t>(pdims_[u]);
            }
            std::size_t src = 0;
            bool outside = false;
            for (int ax = 0; ax < l_.rank; ++ax) {
                const auto u = static_cast<std::size_t>(ax);
                const int N = l_.dims[u];
                int i = pidx[u] - (pdims_[u] - N) / 2;
                if (i < 0 || i >= N) {
                    outside = true;
                    i = std::clamp(i, 0, N - 1);
                }
                src += static_cast<std::size_t>(i) * l_.strides[u];
            }
            if (outside && zero_pad) continue;
            buf[s] = std::conj(a_.values()[src * bs + entry]);
        }
        detail::fft_many(buf.data(), pdims_, 1, -1);
        return buf;
    }

    // Regularized integral for one eps from a padded spectrum, cropped back
    // to the symbol grid.
    std::vector<Complex> level(const std::vector<Complex>& spectrum, double eps) const {
        const int n = l_.rank / 2;
        std::vector<std::vector<Complex>> tables;
        for (int j = 0; j < n; ++j) {
            const auto ux = static_cast<std::size_t>(j);
            const auto uxi = static_cast<std::size_t>(n + j);
            tables.push_back(pair_multiplier(pdims_[ux], l_.steps[ux], pdims_[uxi], l_.steps[uxi], eps));
        }
        std::vector<Complex> buf(ptotal_);
        std::array<int, 2 * kMaxDim> pidx{};
        for (std::size_t s = 0; s < ptotal_; ++s) {
            std::size_t rem = s;
            for (int ax = l_.rank - 1; ax >= 0; --ax) {
                const auto u = static_cast<std::size_t>(ax);
                pidx[u] = static_cast<int>(rem % static_cast<std::size_t>(pdims_[u]));
                rem /= static_cast<std::size_t>(pdims_[u]);
            }
            Complex m = 1.0;
            for (int j = 0; j < n; ++j) {
                const auto uxi = static_cast<std::size_t>(n + j);
                m *= tables[static_cast<std::size_t>(j)]
                           [static_cast<std::size_t>(pidx[static_cast<std::size_t>(j)]) * pdims_[uxi] + pidx[uxi]];
            }
            buf[s] = spectrum[s] * m;
        }
        detail::fft_many(buf.data(), pdims_, 1, +1);
        std::vector<Complex> out(l_.total);
        const double inv = 1.0 / static_cast<double>(ptotal_);
        for (std::size_t s = 0; s < l_.total; ++s) {
            std::size_t rem = s;
            std::size_t dst = 0;
            std::size_t pstride = 1;
            for (int ax = l_.rank - 1; ax >= 0; --ax) {
                const auto u = static_cast<std::size_t>(ax);
                const int N = l_.dims[u];
                const int i = static_cast<int>(rem % static_cast<std::size_t>(N));
                rem /= static_cast<std::size_t>(N);
                dst += static_cast<std::size_t>(i + (pdims_[u] - N) / 2) * pstride;
                pstride *= static_cast<std::size_t>(pdims_[u]);
            }
            out[s] = buf[dst] * inv;
        }
        return out;
    }

private:
    const SampledSymbol& a_;
    Layout l_;
    int pad_;
    std::vector<int> pdims_;
    std::size_t ptotal_ = 1;
};

}  // namespace

// ------------------------------------------------------------ MultiIndexBox

MultiIndexBox::MultiIndexBox(int n) : n_(n) {
    if (n < 1 || n > kMaxDim) throw InvalidInput("multi-index dimension must be 1 or 2");
    const int count = 1 << (2 * n);
    for (int bits = 0; bits < count; ++bits) {
        Pair p;
        for (int j = 0; j < n; ++j) {
            p.beta[static_cast<std::size_t>(j)] = (bits >> j) & 1;
            p.gamma[static_cast<std::size_t>(j)] = (bits >> (n + j)) & 1;
        }
        pairs_.push_back(p);
    }
}

// ----------------------------------------------------------- quantization

ModuleFunction quantize_apply(const SampledSymbol& a, const ModuleFunction& phi, SymbolSide side) {
    check_symbol_grids(a.grid_x(), a.grid_xi(), a.k(), phi);
    phi.require_schwartz("quantize_apply");
    return tag_by_decay(apply_sampled(a, phi, side));
}

ModuleFunction quantize_apply(const SymbolFunction& a, int k, const ModuleFunction& phi, SymbolSide side) {
    if (k != phi.k()) throw ShapeError("symbol and function have different algebra dimensions");
    phi.require_schwartz("quantize_apply");
    const auto phi_hat = fourier_unchecked(phi, DecayClass::schwartz);
    const GridSpec& gx = phi.grid();
    const GridSpec& gxi = phi_hat.grid();
    std::vector<Point> xs(gx.size()), xis(gxi.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = gx.point(i);
    for (std::size_t i = 0; i < xis.size(); ++i) xis[i] = gxi.point(i);
    std::vector<Complex> buf(static_cast<std::size_t>(k) * k);
    auto at = [&](std::size_t ix, std::size_t ixi) {
        a(xs[ix], xis[ixi], buf);
        return static_cast<const Complex*>(buf.data());
    };
    return tag_by_decay(apply_core(gx, k, phi_hat, at, side));
}

ModuleFunction quantize_apply_direct(const SampledSymbol& a, const ModuleFunction& phi, SymbolSide side) {
    check_symbol_grids(a.grid_x(), a.grid_xi(), a.k(), phi);
    const auto phi_hat = fourier_direct(phi);
    const GridSpec& gx = a.grid_x();
    const GridSpec& gxi = a.grid_xi();
    const int k = a.k();
    const int n = gx.n();
    const double scale = gxi.cell_volume() / std::pow(2.0 * std::numbers::pi, 0.5 * n);
    ModuleFunction out(gx, k, DecayClass::bounded);
    for (std::size_t ix = 0; ix < gx.size(); ++ix) {
        const Point x = gx.point(ix);
        Complex* dst = out.block(ix).data();
        for (std::size_t ixi = 0; ixi < gxi.size(); ++ixi) {
            const Point xi = gxi.point(ixi);
            double phase = 0.0;
            for (int c = 0; c < n; ++c) phase += x[static_cast<std::size_t>(c)] * xi[static_cast<std::size_t>(c)];
            const Complex e = std::polar(scale, phase);
            if (side == SymbolSide::left)
                detail::mul_add(dst, a.block(ix, ixi).data(), phi_hat.block(ixi).data(), k, e);
            else
                detail::mul_add(dst, phi_hat.block(ixi).data(), a.block(ix, ixi).data(), k, e);
        }
    }
    return tag_by_decay(std::move(out));
}

ModuleFunction quantize_adjoint_apply(const SampledSymbol& a, const ModuleFunction& psi) {
    check_symbol_grids(a.grid_x(), a.grid_xi(), a.k(), psi);
    const GridSpec& gx = a.grid_x();
    const GridSpec& gxi = a.grid_xi();
    const int k = a.k();
    const int n = gx.n();
    const std::size_t bs = a.block_size();
    const auto table = phase_table(gx, gxi, -1.0);
    std::vector<Complex> row(gxi.size());
    std::vector<Complex> tmp(bs);
    ModuleFunction w(gxi, k, DecayClass::bounded);
    for (std::size_t ix = 0; ix < gx.size(); ++ix) {
        phase_row(table, gxi, n, gx.multi_index(ix), row);
        const Complex* v = psi.block(ix).data();
        for (std::size_t ixi = 0; ixi < gxi.size(); ++ixi) {
            for (std::size_t c = 0; c < bs; ++c) tmp[c] = row[ixi] * v[c];
            detail::adj_mul_add(w.block(ixi).data(), a.block(ix, ixi).data(), tmp.data(), k);
        }
    }
    w *= transform_scale(n) * gx.cell_volume();
    return inverse_fourier_unchecked(w, DecayClass::bounded);
}

// --------------------------------------------------------------- seminorm

double pi_seminorm(const SampledSymbol& a) {
    const Layout l = layout_of(a);
    require_resolution(l, "pi_seminorm");
    double best = 0.0;
    seminorm_walk(a.values(), l, 0, a.block_size(), a.k(), best);
    return best;
}

// ---------------------------------------------------------- operator norm

NormEstimate operator_norm_estimate(const SampledSymbol& a, int iterations, std::uint64_t seed, double tolerance) {
    if (iterations < 1) throw InvalidInput("operator_norm_estimate needs at least one iteration");
    const GridSpec& g = a.grid_x();
    if (!(a.grid_xi() == g.dual())) throw ShapeError("symbol xi-grid is not the dual of its x-grid");
    Rng rng(seed);
    ModuleFunction v(g, a.k(), DecayClass::bounded);
    for (auto& z : v.values()) z = rng.complex_normal();
    v *= 1.0 / entry_norm(v);

    NormEstimate est;
    int calm = 0;
    double previous = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const ModuleFunction w = apply_sampled(a, v, SymbolSide::left);
        const double sigma = entry_norm(w);  // ||T v|| with ||v|| = 1
        est.value = std::max(est.value, sigma);
        est.history.push_back(est.value);
        est.iterations = it + 1;
        if (it > 0 && std::abs(sigma - previous) <= tolerance * sigma) {
            if (++calm >= 10) {
                est.converged = true;
                break;
            }
        } else {
            calm = 0;
        }
        previous = sigma;
        ModuleFunction u = quantize_adjoint_apply(a, w);
        const double nu = entry_norm(u);
        if (nu == 0.0) {
            est.converged = true;
            break;
        }
        v = std::move(u);
        v *= 1.0 / nu;
    }
    return est;
}

double default_l_config(int n) { return 1.5 * std::pow(kTwoPi, n); }

VerificationReport cv_bound_check(const SampledSymbol& a, int trial_count, std::uint64_t seed, double l_config) {
    if (trial_count < 1) throw InvalidInput("cv_bound_check needs at least one trial");
    const double pi_a = pi_seminorm(a);
    if (!(pi_a > 0.0)) throw InvalidInput("cv_bound_check: pi(a) vanishes");
    static const char* recipes[] = {"gaussian", "modulated-gaussian", "bump"};
    VerificationReport report("cv-bound");
    double worst = 0.0;
    const Rng root(seed);
    for (int t = 0; t < trial_count; ++t) {
        Rng stream = root.split(static_cast<std::uint64_t>(t));
        const auto phi = make_test_function(recipes[t % 3], a.grid_x(), stream.next_u64(), a.k());
        const double ratio = module_norm(quantize_apply(a, phi)) / (pi_a * module_norm(phi));
        worst = std::max(worst, ratio);
        report.add_series("ratio", t, ratio);
    }
    report.add_metric("max_ratio", worst, l_config);
    return report;
}

// ------------------------------------------------------- windowed transform

namespace {

ModuleFunction windowed_slice(const ModuleFunction& phi, const Point& x) {
    const GridSpec& g = phi.grid();
    const int n = g.n();
    ModuleFunction w(g, phi.k(), DecayClass::schwartz);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point y = g.point(i);
        Complex h = 1.0;
        for (int j = 0; j < n; ++j) h /= Complex(-(y[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]), 1.0);
        const auto src = phi.block(i);
        auto dst = w.block(i);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] = h * src[c];
    }
    return fourier_unchecked(w, DecayClass::schwartz);
}

}  // namespace

SampledSymbol windowed_transform(const ModuleFunction& phi, const GridSpec& x_grid) {
    if (x_grid.n() != phi.grid().n()) throw ShapeError("windowed_transform: dimension mismatch");
    phi.require_schwartz("windowed_transform");
    SampledSymbol g(x_grid, phi.grid().dual(), phi.k(), DecayClass::bounded);
    const std::size_t row = phi.grid().size() * phi.block_size();
    for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
        const auto slice = windowed_slice(phi, x_grid.point(ix));
        std::copy(slice.values().begin(), slice.values().end(), g.values().begin() + static_cast<std::ptrdiff_t>(ix * row));
    }
    return g;
}

AlgebraElement windowed_gram(const ModuleFunction& phi, const GridSpec& x_grid) {
    if (x_grid.n() != phi.grid().n()) throw ShapeError("windowed_gram: dimension mismatch");
    phi.require_schwartz("windowed_gram");
    Matrix acc = Matrix::Zero(phi.k(), phi.k());
    for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
        const auto slice = windowed_slice(phi, x_grid.point(ix));
        acc += module_inner(slice, slice).matrix();
    }
    return AlgebraElement(Matrix(acc * x_grid.cell_volume()));
}

// ----------------------------------------------------------- adjoint symbol

SampledSymbol regularized_adjoint_symbol(const SampledSymbol& a, double eps, int pad_factor) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidInput("regularization must be a finite eps >= 0");
    AdjointWorkspace ws(a, pad_factor);
    SampledSymbol p(a.grid_x(), a.grid_xi(), a.k(), a.decay_class());
    const int k = a.k();
    const std::size_t bs = a.block_size();
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            // entry (r, c) of a^* is the conjugate of entry (c, r) of a
            const auto values = ws.level(ws.padded_spectrum(c, r), eps);
            const std::size_t e = static_cast<std::size_t>(r + c * k);
            for (std::size_t s = 0; s < values.size(); ++s) p.values()[s * bs + e] = values[s];
        }
    return p;
}

AdjointSymbolResult adjoint_symbol(const SampledSymbol& a, const RegularizationSchedule& schedule) {
    const auto& eps = schedule.epsilons;
    if (eps.empty()) throw InvalidInput("empty regularization schedule");
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
            throw InvalidInput("regularization schedule must be positive and strictly decreasing");

    AdjointWorkspace ws(a, schedule.pad_factor);
    SampledSymbol p(a.grid_x(), a.grid_xi(), a.k(), a.decay_class());
    const int k = a.k();
    const std::size_t bs = a.block_size();
    const std::size_t levels = eps.size();
    std::vector<double> trace(levels - 1, 0.0);

    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            const auto spectrum = ws.padded_spectrum(c, r);
            // Neville table in eps, built one anti-diagonal at a time:
            // diag[j] = T[m - j][j]; diag[m] is the estimate using levels 0..m.
            std::vector<std::vector<Complex>> diag;
            for (std::size_t m = 0; m < levels; ++m) {
                std::vector<std::vector<Complex>> next;
                next.push_back(ws.level(spectrum, eps[m]));
                for (std::size_t j = 1; j <= m; ++j) {
                    const double ratio = eps[m - j] / eps[m] - 1.0;
                    const auto& lower = next[j - 1];
                    const auto& upper = diag[j - 1];
                    std::vector<Complex> t(lower.size());
                    for (std::size_t s = 0; s < t.size(); ++s) t[s] = lower[s] + (lower[s] - upper[s]) / ratio;
                    next.push_back(std::move(t));
                }
                if (m > 0) {
                    double d = 0.0;
                    for (std::size_t s = 0; s < next[m].size(); ++s) d = std::max(d, std::abs(next[m][s] - diag[m - 1][s]));
                    trace[m - 1] = std::max(trace[m - 1], d);
                }
                diag = std::move(next);
            }
            const std::size_t e = static_cast<std::size_t>(r + c * k);
            const auto& best = diag[levels - 1];
            for (std::size_t s = 0; s < best.size(); ++s) p.values()[s * bs + e] = best[s];
        }

    const double limit = schedule.tolerance * std::max(1.0, a.sup_norm());
    if (!trace.empty() && trace.back() > limit)
        throw ConvergenceError("adjoint_symbol: extrapolated estimates did not settle", trace);
    return {std::move(p), std::move(trace)};
}

// ------------------------------------------------------------ cutoff family

SampledSymbol cutoff_family(const SampledSymbol& a, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("cutoff_family requires 0 < eps <= 1");
    SampledSymbol out = a;
    const int n = a.grid_x().n();
    for (std::size_t ix = 0; ix < a.grid_x().size(); ++ix) {
        const Point x = a.grid_x().point(ix);
        for (std::size_t ixi = 0; ixi < a.grid_xi().size(); ++ixi) {
            const Point xi = a.grid_xi().point(ixi);
            double r2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const auto u = static_cast<std::size_t>(j);
                r2 += x[u] * x[u] + xi[u] * xi[u];
            }
            const double w = cutoff_profile(eps * std::sqrt(r2));
            for (auto& v : out.block(ix, ixi)) v *= w;
        }
    }
    if (out.decay_class() == DecayClass::bounded) {
        // compact support: the result is a decaying symbol
        SampledSymbol tagged(a.grid_x(), a.grid_xi(), a.k(), DecayClass::schwartz);
        tagged.values() = std::move(out.values());
        return tagged;
    }
    return out;
}

// ------------------------------------------------------------- operb pair

SampledSymbol operb_transform(const SampledSymbol& a) {
    const Layout l = layout_of(a);
    require_resolution(l, "operb_transform");
    const std::size_t bs = a.block_size();
    std::vector<Complex> f = a.values();
    for (int ax = 0; ax < l.rank; ++ax) {
        const auto d1 = differentiate(f, l, ax, bs, 1);
        const auto d2 = differentiate(f, l, ax, bs, 2);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += 2.0 * d1[i] + d2[i];
    }
    SampledSymbol b(a.grid_x(), a.grid_xi(), a.k(), a.decay_class());
    b.values() = std::move(f);
    return b;
}

OperbReconstruction operb_reconstruct(const SampledSymbol& b) {
    const Layout l = layout_of(b);
    const std::size_t bs = b.block_size();
    const bool constant_continuation = b.decay_class() == DecayClass::bounded;
    bool reaches_out = false;
    std::vector<Complex> f = b.values();

    for (int ax = 0; ax < l.rank; ++ax) {
        const auto u = static_cast<std::size_t>(ax);
        const int N = l.dims[u];
        const double h = l.steps[u];
        const int M = static_cast<int>(std::ceil(kOperbKernelCutoff / h));
        if (M >= N) reaches_out = true;
        // Rectangle weights of t e^{-t}, normalized to unit mass. The
        // normalization removes the leading h^2/12 error of the rule (the
        // integrand vanishes at t = 0 and the correction is proportional to
        // b(x)), and makes constants reproduce exactly.
        std::vector<double> w(static_cast<std::size_t>(M) + 1, 0.0);
        double mass = 0.0;
        for (int m = 1; m <= M; ++m) {
            const double t = m * h;
            w[static_cast<std::size_t>(m)] = h * t * std::exp(-t);
            mass += w[static_cast<std::size_t>(m)];
        }
        for (auto& x : w) x /= mass;
        // tail[m] = sum of weights from m on (for constant continuation)
        std::vector<double> tail(static_cast<std::size_t>(M) + 2, 0.0);
        for (int m = M; m >= 0; --m) tail[static_cast<std::size_t>(m)] = tail[static_cast<std::size_t>(m) + 1] + w[static_cast<std::size_t>(m)];

        std::vector<Complex> out(f.size(), Complex{});
        const std::size_t st = l.strides[u];
        for (std::size_t s = 0; s < l.total; ++s) {
            const int i = static_cast<int>((s / st) % static_cast<std::size_t>(N));
            if (i != 0) continue;  // s is the first sample of a line along this axis
            for (int p = 0; p < N; ++p) {
                Complex* o = out.data() + (s + static_cast<std::size_t>(p) * st) * bs;
                const int reach = std::min(M, p);
                for (int m = 1; m <= reach; ++m) {
                    const Complex* q = f.data() + (s + static_cast<std::size_t>(p - m) * st) * bs;
                    const double wm = w[static_cast<std::size_t>(m)];
                    for (std::size_t c = 0; c < bs; ++c) o[c] += wm * q[c];
                }
                if (constant_continuation && p < M) {
                    const Complex* q = f.data() + s * bs;
                    const double wt = tail[static_cast<std::size_t>(p) + 1];
                    for (std::size_t c = 0; c < bs; ++c) o[c] += wt * q[c];
                }
            }
        }
        f = std::move(out);
    }

    OperbReconstruction r{SampledSymbol(b.grid_x(), b.grid_xi(), b.k(), b.decay_class()), false};
    r.a.values() = std::move(f);
    if (reaches_out) {
        // the off-box continuation only matters if b is not negligible at
        // the lower edges the kernel reaches past
        const double sup = b.sup_norm();
        double edge = 0.0;
        for (std::size_t s = 0; s < l.total; ++s) {
            bool low = false;
            for (int ax = 0; ax < l.rank; ++ax) {
                const auto u = static_cast<std::size_t>(ax);
                const int i = static_cast<int>((s / l.strides[u]) % static_cast<std::size_t>(l.dims[u]));
                if (i < l.dims[u] / 20 + 1) low = true;
            }
            if (low) edge = std::max(edge, cstar_norm(std::span<const Complex>(b.values().data() + s * bs, bs), b.k()));
        }
        r.kernel_truncated = edge > 1e-6 * sup;
    }
    return r;
}

}  // namespace pdo
