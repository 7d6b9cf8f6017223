#include "pdo/heisenberg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pdo/error.hpp"
#include "pdo/fourier.hpp"

namespace pdo {

namespace {

constexpr double kAlignment = 1e-9;

ModuleFunction retag(ModuleFunction f, DecayClass input) {
    if (input == DecayClass::bounded) return f;
    const DecayClass d = f.satisfies_decay() ? DecayClass::schwartz : DecayClass::bounded;
    return f.with_decay(d);
}

// Integer grid offsets of z, or nullopt when some axis is off-grid.
std::optional<std::array<int, kMaxDim>> grid_offsets(const GridSpec& g, const Point& z) {
    std::array<int, kMaxDim> q{};
    for (int a = 0; a < g.n(); ++a) {
        const double t = z[static_cast<std::size_t>(a)] / g.spacing();
        const double r = std::round(t);
        if (std::abs(t - r) > kAlignment) return std::nullopt;
        q[static_cast<std::size_t>(a)] = static_cast<int>(r);
    }
    return q;
}

// out(x_j) = f(x_j - q h), continued by zero or by the nearest edge sample.
ModuleFunction index_shift(const ModuleFunction& f, const std::array<int, kMaxDim>& q) {
    const GridSpec& g = f.grid();
    const int N = g.points_per_axis();
    const bool zero_fill = f.decay_class() == DecayClass::schwartz;
    ModuleFunction out(g, f.k(), f.decay_class());
    for (std::size_t j = 0; j < g.size(); ++j) {
        auto idx = g.multi_index(j);
        bool outside = false;
        for (int a = 0; a < g.n(); ++a) {
            int& i = idx[static_cast<std::size_t>(a)];
            i -= q[static_cast<std::size_t>(a)];
            if (i < 0 || i >= N) {
                outside = true;
                i = std::clamp(i, 0, N - 1);
            }
        }
        if (outside && zero_fill) continue;
        const auto src = f.block(g.flat_index(idx));
        std::copy(src.begin(), src.end(), out.block(j).begin());
    }
    return out;
}

ModuleFunction spectral_shift(const ModuleFunction& f, const Point& z) {
    auto fh = fourier_unchecked(f, DecayClass::schwartz);
    const GridSpec& d = fh.grid();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Point xi = d.point(i);
        double phase = 0.0;
        for (int a = 0; a < d.n(); ++a) phase -= xi[static_cast<std::size_t>(a)] * z[static_cast<std::size_t>(a)];
        const Complex c = std::polar(1.0, phase);
        for (Complex& v : fh.block(i)) v *= c;
    }
    return inverse_fourier_unchecked(fh, f.decay_class());
}

ModuleFunction shift(const ModuleFunction& f, const Point& z, TranslationMode mode) {
    if (mode == TranslationMode::grid) {
        const auto q = grid_offsets(f.grid(), z);
        if (!q) throw PreconditionError("heisenberg_translate: z is not a multiple of the grid spacing");
        return index_shift(f, *q);
    }
    if (f.decay_class() != DecayClass::schwartz)
        throw PreconditionError("heisenberg_translate: the interpolating shift needs a rapidly decreasing field");
    return spectral_shift(f, z);
}

// Multiplies sample j by e^{i (t + zeta.(x_j + offset))}.
void modulate(ModuleFunction& f, const Point& zeta, const Point& offset, double t) {
    const GridSpec& g = f.grid();
    for (std::size_t j = 0; j < g.size(); ++j) {
        const Point x = g.point(j);
        double phase = t;
        for (int a = 0; a < g.n(); ++a) {
            const auto ua = static_cast<std::size_t>(a);
            phase += zeta[ua] * (x[ua] + offset[ua]);
        }
        const Complex c = std::polar(1.0, phase);
        for (Complex& v : f.block(j)) v *= c;
    }
}

Point minus(const Point& p) {
    Point out{};
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = -p[a];
    return out;
}

}  // namespace

// ------------------------------------------------------------ OperatorHandle

OperatorHandle::OperatorHandle(OperatorKind kind, Action action)
    : kind_(kind), action_(std::make_shared<const Action>(std::move(action))) {
    if (!*action_) throw InvalidInput("operator handle needs an action");
}

OperatorHandle OperatorHandle::from_symbol(SampledSymbol a, SymbolSide side) {
    auto sym = std::make_shared<const SampledSymbol>(std::move(a));
    OperatorHandle h(OperatorKind::from_symbol,
                     [sym, side](const ModuleFunction& phi) { return quantize_apply(*sym, phi, side); });
    h.symbol_ = std::move(sym);
    return h;
}

OperatorHandle OperatorHandle::from_symbol(SymbolFunction a, int k, SymbolSide side) {
    return OperatorHandle(OperatorKind::from_symbol, [a = std::move(a), k, side](const ModuleFunction& phi) {
        return quantize_apply(a, k, phi, side);
    });
}

OperatorHandle OperatorHandle::left_rep(ModuleFunction F, DeformationMatrix J) {
    auto f = std::make_shared<const ModuleFunction>(std::move(F));
    return OperatorHandle(OperatorKind::left_rep,
                          [f, J](const ModuleFunction& phi) { return left_rep_apply(*f, phi, J); });
}

OperatorHandle OperatorHandle::right_rep(ModuleFunction G, DeformationMatrix J) {
    auto g = std::make_shared<const ModuleFunction>(std::move(G));
    return OperatorHandle(OperatorKind::right_rep,
                          [g, J](const ModuleFunction& phi) { return right_rep_apply(*g, phi, J); });
}

OperatorHandle OperatorHandle::composite(Action action) { return OperatorHandle(OperatorKind::composite, std::move(action)); }

OperatorHandle compose(const OperatorHandle& outer, const OperatorHandle& inner) {
    return OperatorHandle::composite([outer, inner](const ModuleFunction& phi) { return outer(inner(phi)); });
}

OperatorHandle commutator(const OperatorHandle& A, const OperatorHandle& B) {
    return OperatorHandle::composite([A, B](const ModuleFunction& phi) { return A(B(phi)) - B(A(phi)); });
}

// ------------------------------------------------------------ translations

ModuleFunction heisenberg_translate(const ModuleFunction& f, const Point& z, const Point& zeta, double t,
                                    TranslationMode mode) {
    ModuleFunction out = shift(f, z, mode);
    modulate(out, zeta, Point{}, t);
    return retag(std::move(out), f.decay_class());
}

ModuleFunction heisenberg_translate_inverse(const ModuleFunction& g, const Point& z, const Point& zeta, double t,
                                            TranslationMode mode) {
    ModuleFunction out = shift(g, minus(z), mode);
    modulate(out, minus(zeta), z, -t);
    return retag(std::move(out), g.decay_class());
}

OperatorHandle conjugate_operator(const OperatorHandle& T, const Point& z, const Point& zeta, double t,
                                  TranslationMode mode) {
    return OperatorHandle::composite([T, z, zeta, t, mode](const ModuleFunction& phi) {
        return heisenberg_translate_inverse(T(heisenberg_translate(phi, z, zeta, t, mode)), z, zeta, t, mode);
    });
}

// ------------------------------------------------------------ smoothness

ModuleFunction smoothness_probe(const OperatorFamily& family, const ModuleFunction& phi, const SmoothnessOrder& order,
                                double step) {
    const int n = phi.grid().n();
    // Active coordinates: 0..n-1 for z, n..2n-1 for zeta.
    std::vector<int> active;
    for (int a = 0; a < n; ++a) {
        const int b = order.beta[static_cast<std::size_t>(a)];
        const int c = order.gamma[static_cast<std::size_t>(a)];
        if (b < 0 || b > 1 || c < 0 || c > 1) throw InvalidInput("smoothness_probe: orders must be 0 or 1");
        if (b) active.push_back(a);
    }
    for (int a = 0; a < n; ++a)
        if (order.gamma[static_cast<std::size_t>(a)]) active.push_back(n + a);
    if (!(step >= phi.grid().spacing()))
        throw ResolutionError("smoothness_probe: step is below the grid spacing");

    const int m = static_cast<int>(active.size());
    if (m == 0) return family(Point{}, Point{})(phi);

    ModuleFunction acc(phi.grid(), phi.k(), DecayClass::bounded);
    bool first = true;
    for (int pattern = 0; pattern < (1 << m); ++pattern) {
        Point z{}, zeta{};
        double sign = 1.0;
        for (int i = 0; i < m; ++i) {
            const double s = (pattern >> i) & 1 ? -1.0 : 1.0;
            sign *= s;
            const int c = active[static_cast<std::size_t>(i)];
            (c < n ? z[static_cast<std::size_t>(c)] : zeta[static_cast<std::size_t>(c - n)]) = s * step;
        }
        ModuleFunction term = family(z, zeta)(phi) * Complex(sign);
        if (first) {
            acc = std::move(term);
            first = false;
        } else {
            acc += term;
        }
    }
    acc *= Complex(std::pow(2.0 * step, -m));
    return acc;
}

// ------------------------------------------------------------ heissmooth

VerificationReport heissmooth_check(const OperatorHandle& T, const DeformationMatrix& J,
                                    const std::vector<PhaseSpaceShift>& samples,
                                    const std::vector<ModuleFunction>& phis, double tolerance) {
    if (samples.empty() || phis.empty()) throw InvalidInput("heissmooth_check: empty sample or test-function set");
    VerificationReport report;
    double worst = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& [z, zeta] = samples[s];
        const Point jz = J.apply(zeta);
        Point reduced{};
        for (std::size_t a = 0; a < reduced.size(); ++a) reduced[a] = z[a] - jz[a];
        const auto lhs_op = conjugate_operator(T, z, zeta, 0.0, TranslationMode::interpolate);
        const auto rhs_op = conjugate_operator(T, reduced, Point{}, 0.0, TranslationMode::interpolate);
        double sample_worst = 0.0;
        for (const auto& phi : phis) {
            const auto rhs = rhs_op(phi);
            double scale = module_norm(rhs);
            if (scale == 0.0) scale = module_norm(phi);
            sample_worst = std::max(sample_worst, module_norm(lhs_op(phi) - rhs) / scale);
        }
        report.add_series("deviation", static_cast<double>(s), sample_worst);
        worst = std::max(worst, sample_worst);
    }
    report.add_metric("max_relative_deviation", worst, tolerance, Comparison::le,
                      "||T_{z,zeta} phi - T_{z-J zeta,0} phi|| relative to the second");
    return report;
}

// ------------------------------------------------------------ commutant

ModuleFunction extract_field(const SampledSymbol& a) {
    const GridSpec& gx = a.grid_x();
    const int o = a.grid_xi().origin_index();
    const std::size_t zero_index = a.grid_xi().flat_index({o, o});
    ModuleFunction F(gx, a.k(), DecayClass::bounded);
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const auto src = a.block(i, zero_index);
        std::copy(src.begin(), src.end(), F.block(i).begin());
    }
    return F.with_decay(F.satisfies_decay() ? DecayClass::schwartz : DecayClass::bounded);
}

double symbol_translation_deviation(const SampledSymbol& a, const DeformationMatrix& J) {
    const ModuleFunction F = extract_field(a);
    const GridSpec& gx = a.grid_x();
    const GridSpec& gxi = a.grid_xi();
    const std::size_t bs = a.block_size();
    std::vector<Complex> diff(bs);
    double worst = 0.0;
    for (std::size_t ixi = 0; ixi < gxi.size(); ++ixi) {
        const Point s = J.apply(gxi.point(ixi));
        const auto q = grid_offsets(gx, s);
        const ModuleFunction shifted = q ? index_shift(F, *q) : spectral_shift(F, s);
        for (std::size_t ix = 0; ix < gx.size(); ++ix) {
            const auto av = a.block(ix, ixi);
            const auto fv = shifted.block(ix);
            for (std::size_t e = 0; e < bs; ++e) diff[e] = av[e] - fv[e];
            worst = std::max(worst, cstar_norm(diff, a.k()));
        }
    }
    return worst;
}

VerificationReport commutant_check(const OperatorHandle& T, const DeformationMatrix& J,
                                   const std::vector<ModuleFunction>& G_suite,
                                   const std::vector<ModuleFunction>& phi_suite, const CommutantOptions& options) {
    const SampledSymbol* a = T.symbol();
    if (a == nullptr) throw PreconditionError("commutant_check: the operator must be built from a sampled symbol");
    if (G_suite.empty() || phi_suite.empty()) throw InvalidInput("commutant_check: empty suite");

    VerificationReport report;
    double comm = 0.0;
    int pair = 0;
    for (const auto& G : G_suite) {
        const auto RG = OperatorHandle::right_rep(G, J);
        for (const auto& phi : phi_suite) {
            const double r = module_norm(T(RG(phi)) - RG(T(phi))) / module_norm(phi);
            report.add_series("commutator", pair++, r);
            comm = std::max(comm, r);
        }
    }
    const double scale = std::max(1.0, a->sup_norm());
    const double sym = symbol_translation_deviation(*a, J) / scale;

    if (options.expect_commuting) {
        report.add_metric("commutator", comm, options.commutation_tolerance, Comparison::le,
                          "max ||[T, R_G] phi|| / ||phi||");
        report.add_metric("symbol_deviation", sym, options.symbol_tolerance, Comparison::le,
                          "sup ||a(x,xi) - a(x - J xi, 0)|| / max(1, sup ||a||)");
        const auto F = extract_field(*a);
        double ext = 0.0;
        for (const auto& phi : phi_suite)
            ext = std::max(ext, module_norm(T(phi) - left_rep_apply(F, phi, J)) / module_norm(phi));
        report.add_metric("extraction", ext, options.extraction_tolerance, Comparison::le,
                          "max ||T phi - L_F phi|| / ||phi|| with F(z) = a(z, 0)");
    } else {
        report.add_metric("commutator", comm, options.separation, Comparison::ge,
                          "counterexample: commutator must stay away from zero");
        report.add_metric("symbol_deviation", sym, options.separation, Comparison::ge,
                          "counterexample: symbol is not of the form F(x - J xi)");
    }
    const bool small_comm = comm <= options.commutation_tolerance;
    const bool small_sym = sym <= options.symbol_tolerance;
    report.add_metric("implication", small_comm == small_sym ? 1.0 : 0.0, 1.0, Comparison::ge,
                      "small commutator and translation-invariant symbol occur together");
    return report;
}

}  // namespace pdo
