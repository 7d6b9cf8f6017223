#include "pdo/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdo/bump.hpp"
#include "pdo/detail/blocks.hpp"
#include "pdo/error.hpp"
#include "pdo/fourier.hpp"

namespace pdo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Spectral samples below this fraction of the largest one are skipped; they
// cannot move the result at double precision.
constexpr double kNegligible = 1e-18;

double max_block_norm(const ModuleFunction& f) {
    double m = 0.0;
    for (const Complex& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

bool negligible(std::span<const Complex> block, double limit) {
    for (const Complex& v : block)
        if (std::abs(v) > limit) return false;
    return true;
}

ModuleFunction tag_result(ModuleFunction f, bool both_decaying) {
    if (both_decaying) return f.with_decay(DecayClass::schwartz);
    return f.with_decay(f.satisfies_decay() ? DecayClass::schwartz : DecayClass::bounded);
}

ModuleFunction pointwise_product(const ModuleFunction& F, const ModuleFunction& G) {
    ModuleFunction out(F.grid(), F.k(), DecayClass::bounded);
    for (std::size_t i = 0; i < F.size(); ++i) detail::mul_add(out.block(i).data(), F.block(i).data(), G.block(i).data(), F.k());
    return out;
}

ModuleFunction twisted_convolution(const ModuleFunction& F, const ModuleFunction& G, const DeformationMatrix& J) {
    const auto Fh = fourier_unchecked(F, DecayClass::schwartz);
    const auto Gh = fourier_unchecked(G, DecayClass::schwartz);
    const GridSpec& d = Fh.grid();
    const int n = d.n();
    const int N = d.points_per_axis();
    const int k = F.k();
    const std::size_t bs = F.block_size();
    const double limit = kNegligible * max_block_norm(Fh);

    ModuleFunction H(d, k, DecayClass::schwartz);
    std::array<std::vector<Complex>, kMaxDim> rows;
    for (auto& r : rows) r.resize(static_cast<std::size_t>(N));

    for (std::size_t e = 0; e < d.size(); ++e) {
        const auto fe = Fh.block(e);
        if (negligible(fe, limit)) continue;
        const auto ie = d.multi_index(e);
        const Point v = J.apply_transpose(d.point(e));  // eta.J u = (J^T eta).u
        for (int a = 0; a < n; ++a)
            for (int m = 0; m < N; ++m)
                rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] =
                    std::polar(1.0, -v[static_cast<std::size_t>(a)] * d.coordinate(m));
        if (n == 1) {
            for (int u = 0; u < N; ++u) {
                const int w = (ie[0] + u - N / 2 + 2 * N) % N;
                detail::mul_add(H.block(static_cast<std::size_t>(w)).data(), fe.data(),
                                Gh.block(static_cast<std::size_t>(u)).data(), k, rows[0][static_cast<std::size_t>(u)]);
            }
        } else {
            for (int u0 = 0; u0 < N; ++u0) {
                const int w0 = (ie[0] + u0 - N / 2 + 2 * N) % N;
                const Complex p0 = rows[0][static_cast<std::size_t>(u0)];
                for (int u1 = 0; u1 < N; ++u1) {
                    const int w1 = (ie[1] + u1 - N / 2 + 2 * N) % N;
                    const std::size_t wi = static_cast<std::size_t>(w0) * N + w1;
                    const std::size_t ui = static_cast<std::size_t>(u0) * N + u1;
                    detail::mul_add(H.values().data() + wi * bs, fe.data(), Gh.values().data() + ui * bs, k,
                                    p0 * rows[1][static_cast<std::size_t>(u1)]);
                }
            }
        }
    }
    H *= std::pow(kTwoPi, -0.5 * n) * d.cell_volume();
    return inverse_fourier_unchecked(H, DecayClass::schwartz);
}

struct OffsetEntry {
    std::array<int, kMaxDim> offset;
    std::size_t u;
    double weight;
};

// out(x) = (2 pi)^{-n/2} sum_u e^{i u.x} [field(x + sigma J u) spec(u)] dxi^n,
// with the product order set by field_left and field read by multilinear
// interpolation (constant continuation past the box).
ModuleFunction interpolated_shift_sum(const ModuleFunction& field, const ModuleFunction& spec, const DeformationMatrix& J,
                                      double sigma, bool field_left) {
    const GridSpec& g = field.grid();
    const GridSpec& d = spec.grid();
    const int n = g.n();
    const int N = g.points_per_axis();
    const int k = field.k();
    const std::size_t bs = field.block_size();
    const double h = g.spacing();
    const double limit = kNegligible * max_block_norm(spec);

    std::vector<OffsetEntry> entries;
    for (std::size_t u = 0; u < d.size(); ++u) {
        if (negligible(spec.block(u), limit)) continue;
        const Point s = J.apply(d.point(u));
        std::array<int, kMaxDim> q{};
        std::array<double, kMaxDim> r{};
        for (int a = 0; a < n; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            const double t = sigma * s[ua] / h;
            q[ua] = static_cast<int>(std::floor(t));
            r[ua] = t - q[ua];
        }
        for (int corner = 0; corner < (1 << n); ++corner) {
            double w = 1.0;
            std::array<int, kMaxDim> o{};
            for (int a = 0; a < n; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                const int c = (corner >> a) & 1;
                w *= c ? r[ua] : 1.0 - r[ua];
                o[ua] = q[ua] + c;
            }
            if (w != 0.0) entries.push_back({o, u, w});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const OffsetEntry& a, const OffsetEntry& b) { return a.offset < b.offset; });

    ModuleFunction out(g, k, DecayClass::bounded);
    std::size_t begin = 0;
    while (begin < entries.size()) {
        std::size_t end = begin;
        ModuleFunction masked(d, k, DecayClass::schwartz);
        while (end < entries.size() && entries[end].offset == entries[begin].offset) {
            detail::axpy(masked.block(entries[end].u).data(), spec.block(entries[end].u).data(), bs, entries[end].weight);
            ++end;
        }
        const auto W = inverse_fourier_unchecked(masked, DecayClass::bounded);
        const auto o = entries[begin].offset;
        std::array<std::vector<int>, kMaxDim> src;
        for (int a = 0; a < n; ++a) {
            auto& col = src[static_cast<std::size_t>(a)];
            col.resize(static_cast<std::size_t>(N));
            for (int m = 0; m < N; ++m) col[static_cast<std::size_t>(m)] = std::clamp(m + o[static_cast<std::size_t>(a)], 0, N - 1);
        }
        const auto accumulate = [&](std::size_t j, std::size_t from) {
            const Complex* fv = field.values().data() + from * bs;
            const Complex* wv = W.values().data() + j * bs;
            Complex* dst = out.values().data() + j * bs;
            if (field_left)
                detail::mul_add(dst, fv, wv, k);
            else
                detail::mul_add(dst, wv, fv, k);
        };
        if (n == 1) {
            for (int m = 0; m < N; ++m)
                accumulate(static_cast<std::size_t>(m), static_cast<std::size_t>(src[0][static_cast<std::size_t>(m)]));
        } else {
            for (int m0 = 0; m0 < N; ++m0) {
                const std::size_t row = static_cast<std::size_t>(src[0][static_cast<std::size_t>(m0)]) * N;
                for (int m1 = 0; m1 < N; ++m1)
                    accumulate(static_cast<std::size_t>(m0) * N + m1, row + src[1][static_cast<std::size_t>(m1)]);
            }
        }
        begin = end;
    }
    return out;
}

}  // namespace

// -------------------------------------------------------- DeformationMatrix

DeformationMatrix::DeformationMatrix(int n, const std::array<double, 4>& entries) : n_(n) {
    if (n < 1 || n > kMaxDim) throw InvalidInput("deformation matrix dimension must be 1 or 2");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double v = entries[static_cast<std::size_t>(r * 2 + c)];
            if (!std::isfinite(v)) throw InvalidInput("deformation matrix entries must be finite");
            j_[static_cast<std::size_t>(r * 2 + c)] = v;
        }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if ((*this)(r, c) != -(*this)(c, r)) throw InvalidInput("deformation matrix must be skew-symmetric");
}

DeformationMatrix DeformationMatrix::zero(int n) { return DeformationMatrix(n, {0.0, 0.0, 0.0, 0.0}); }

DeformationMatrix DeformationMatrix::standard(double theta) { return DeformationMatrix(2, {0.0, theta, -theta, 0.0}); }

bool DeformationMatrix::is_zero() const noexcept {
    return std::all_of(j_.begin(), j_.end(), [](double v) { return v == 0.0; });
}

Point DeformationMatrix::apply(const Point& u) const noexcept {
    Point out{};
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) out[static_cast<std::size_t>(r)] += (*this)(r, c) * u[static_cast<std::size_t>(c)];
    return out;
}

Point DeformationMatrix::apply_transpose(const Point& u) const noexcept {
    Point out{};
    for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) out[static_cast<std::size_t>(c)] += (*this)(r, c) * u[static_cast<std::size_t>(r)];
    return out;
}

// ---------------------------------------------------------- deformed product

ModuleFunction deformed_product(const ModuleFunction& F, const ModuleFunction& G, const DeformationMatrix& J) {
    if (!(F.grid() == G.grid())) throw ShapeError("deformed_product: grid mismatch");
    if (F.k() != G.k()) throw ShapeError("deformed_product: algebra dimension mismatch");
    if (J.n() != F.grid().n()) throw ShapeError("deformed_product: deformation matrix has the wrong dimension");

    const bool f_decays = F.decay_class() == DecayClass::schwartz;
    const bool g_decays = G.decay_class() == DecayClass::schwartz;
    if (J.is_zero()) return tag_result(pointwise_product(F, G), f_decays && g_decays);
    if (f_decays && g_decays) {
        F.require_schwartz("deformed_product");
        G.require_schwartz("deformed_product");
        return tag_result(twisted_convolution(F, G, J), true);
    }
    if (g_decays) {
        G.require_schwartz("deformed_product");
        return tag_result(interpolated_shift_sum(F, fourier_unchecked(G, DecayClass::schwartz), J, -1.0, true), false);
    }
    if (f_decays) {
        F.require_schwartz("deformed_product");
        return tag_result(interpolated_shift_sum(G, fourier_unchecked(F, DecayClass::schwartz), J, 1.0, false), false);
    }
    throw PreconditionError("deformed_product: at least one factor must be rapidly decreasing when J != 0");
}

ModuleFunction left_rep_apply(const ModuleFunction& F, const ModuleFunction& phi, const DeformationMatrix& J) {
    return deformed_product(F, phi, J);
}

ModuleFunction right_rep_apply(const ModuleFunction& G, const ModuleFunction& phi, const DeformationMatrix& J) {
    return deformed_product(phi, G, J);
}

ModuleFunction commutator_apply(const ModuleFunction& F, const ModuleFunction& G, const ModuleFunction& phi,
                                const DeformationMatrix& J) {
    const auto lr = left_rep_apply(F, right_rep_apply(G, phi, J), J);
    const auto rl = right_rep_apply(G, left_rep_apply(F, phi, J), J);
    return lr - rl;
}

// ----------------------------------------------------- approximate identity

ModuleFunction approximate_identity_bump(int k_index, const GridSpec& freq_grid, int algebra_dim, BumpNormalization norm) {
    if (k_index < 1) throw InvalidInput("approximate identity index must be positive");
    if (1.0 / k_index < 4.0 * freq_grid.spacing())
        throw ResolutionError("approximate identity bump of radius 1/k is not resolved by the grid");
    const int n = freq_grid.n();
    std::vector<double> beta(freq_grid.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        const Point p = freq_grid.point(i);
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(a)];
        beta[i] = cutoff_profile(2.0 * k_index * std::sqrt(r2));
        mass += beta[i];
    }
    mass *= freq_grid.cell_volume();
    const double target = norm == BumpNormalization::transform_measure ? std::pow(kTwoPi, 0.5 * n) : 1.0;
    const AlgebraElement u = approximate_unit(k_index, algebra_dim);
    ModuleFunction out(freq_grid, algebra_dim, DecayClass::schwartz);
    for (std::size_t i = 0; i < beta.size(); ++i) {
        const double w = beta[i] * target / mass;
        const auto ub = u.block();
        auto dst = out.block(i);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = w * ub[c];
    }
    return out;
}

ModuleFunction approximate_identity(int k_index, const GridSpec& freq_grid, int algebra_dim, BumpNormalization norm) {
    return inverse_fourier_unchecked(approximate_identity_bump(k_index, freq_grid, algebra_dim, norm), DecayClass::bounded);
}

// ------------------------------------------------------- brute-force oracle

AlgebraElement deformed_product_bruteforce(const TestFunction& F, const TestFunction& G, const DeformationMatrix& J,
                                           const Point& x, const BruteForceOptions& options) {
    const int n = J.n();
    const int k = F.k();
    if (F.n() != n || G.n() != n || G.k() != k) throw ShapeError("deformed_product_bruteforce: shape mismatch");
    if (options.epsilons.empty()) throw InvalidInput("brute-force oracle needs at least one damping level");

    auto axis = [](double step, double half) {
        std::vector<double> a;
        const int m = static_cast<int>(std::floor(half / step + 1e-9));
        for (int i = -m; i <= m; ++i) a.push_back(i * step);
        return a;
    };
    const auto ug = axis(options.u_step, options.u_max);
    const auto vg = axis(options.v_step, options.v_max);
    const Eigen::Index nu = static_cast<Eigen::Index>(ug.size());
    const Eigen::Index nv = static_cast<Eigen::Index>(vg.size());
    const std::size_t bs = static_cast<std::size_t>(k) * k;

    // P(i, j) = e^{i u_i v_j}
    Matrix P(nu, nv);
    for (Eigen::Index i = 0; i < nu; ++i)
        for (Eigen::Index j = 0; j < nv; ++j) P(i, j) = std::polar(1.0, ug[static_cast<std::size_t>(i)] * vg[static_cast<std::size_t>(j)]);

    const Eigen::Index cu = n == 1 ? 1 : nu;
    const Eigen::Index cv = n == 1 ? 1 : nv;
    // Samples per matrix entry: fu[c](i0, i1) = F(x + J u)_c, gv[c](j0, j1) = G(x + v)_c.
    std::vector<Matrix> fu(bs, Matrix(nu, cu)), gv(bs, Matrix(nv, cv));
    Matrix u2(nu, cu), v2(nv, cv);
    std::vector<Complex> buf(bs);
    for (Eigen::Index i0 = 0; i0 < nu; ++i0)
        for (Eigen::Index i1 = 0; i1 < cu; ++i1) {
            Point u{ug[static_cast<std::size_t>(i0)], n == 2 ? ug[static_cast<std::size_t>(i1)] : 0.0};
            const Point s = J.apply(u);
            F.evaluate(Point{x[0] + s[0], x[1] + s[1]}, buf);
            for (std::size_t c = 0; c < bs; ++c) fu[c](i0, i1) = buf[c];
            u2(i0, i1) = u[0] * u[0] + u[1] * u[1];
        }
    for (Eigen::Index j0 = 0; j0 < nv; ++j0)
        for (Eigen::Index j1 = 0; j1 < cv; ++j1) {
            Point v{vg[static_cast<std::size_t>(j0)], n == 2 ? vg[static_cast<std::size_t>(j1)] : 0.0};
            G.evaluate(Point{x[0] + v[0], x[1] + v[1]}, buf);
            for (std::size_t c = 0; c < bs; ++c) gv[c](j0, j1) = buf[c];
            v2(j0, j1) = v[0] * v[0] + v[1] * v[1];
        }

    const double measure = std::pow(options.u_step * options.v_step / kTwoPi, n);
    std::vector<Matrix> levels;
    for (double eps : options.epsilons) {
        const Matrix du = (-eps * u2.real()).array().exp().cast<Complex>().matrix();
        const Matrix dv = (-eps * v2.real()).array().exp().cast<Complex>().matrix();
        // inner_c(u) = sum_v e^{i u.v} G_c(x + v) e^{-eps |v|^2}
        std::vector<Matrix> inner(bs);
        for (std::size_t c = 0; c < bs; ++c) {
            const Matrix damped = gv[c].cwiseProduct(dv);
            inner[c] = n == 1 ? Matrix(P * damped) : Matrix(P * damped * P.transpose());
        }
        Matrix total = Matrix::Zero(k, k);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c)
                for (int m = 0; m < k; ++m) {
                    const Matrix& f = fu[static_cast<std::size_t>(r + m * k)];
                    const Matrix& g = inner[static_cast<std::size_t>(m + c * k)];
                    total(r, c) += (f.cwiseProduct(du).cwiseProduct(g)).sum();
                }
        levels.push_back(total * measure);
    }
    // Neville extrapolation to eps = 0.
    const auto& eps = options.epsilons;
    std::vector<Matrix> col = levels;
    for (std::size_t j = 1; j < levels.size(); ++j) {
        std::vector<Matrix> next;
        for (std::size_t i = 0; i + j < levels.size(); ++i) {
            const double ratio = eps[i] / eps[i + j] - 1.0;
            next.push_back(col[i + 1] + (col[i + 1] - col[i]) / ratio);
        }
        col = std::move(next);
    }
    return AlgebraElement(col.front());
}

}  // namespace pdo
