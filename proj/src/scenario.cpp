#include "pdo/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "pdo/error.hpp"
#include "pdo/fourier.hpp"
#include "pdo/heisenberg.hpp"
#include "pdo/quantize.hpp"
#include "pdo/rng.hpp"
#include "pdo/test_functions.hpp"

namespace pdo {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

// ------------------------------------------------------------------ defaults

struct ScenarioDefaults {
    int n, N;
    double L;
    int k;
    double theta;
    int trials;
    std::vector<std::pair<std::string, double>> tolerances;
};

// L that makes J xi a grid multiple for every dual-grid xi: theta pi / L = 2 L / N.
double aligned_half_width(double theta, int N) { return std::sqrt(std::abs(theta) * kPi * N / 2.0); }

const std::map<std::string, ScenarioDefaults>& defaults_table() {
    static const std::map<std::string, ScenarioDefaults> table{
        {"fourier-unitarity", {1, 256, 10.0, 2, 0.0, 50, {{"unitarity", 1e-8}, {"roundtrip", 1e-10}, {"norm", 1e-10}, {"oracle", 1e-10}}}},
        {"cv-bound", {1, 256, 10.0, 2, 0.0, 20, {{"l_config", 0.0}, {"scaling", 1e-12}, {"identity", 1e-10}, {"oracle", 1e-10}}}},
        {"windowed-transform", {1, 64, 8.0, 2, 0.0, 5, {{"identity", 1e-4}}}},
        {"adjoint-symbol", {1, 256, 10.0, 2, 0.0, 10, {{"adjoint", 1e-4}, {"convergence", 1e-4}, {"oracle", 1e-10}}}},
        {"operb-roundtrip", {1, 512, 5.0, 1, 0.0, 1, {{"roundtrip", 1e-3}}}},
        {"deformed-product",
         {2, 64, 6.0, 2, 0.5, 2, {{"pointwise", 1e-8}, {"bruteforce", 1e-4}, {"associativity", 1e-4}, {"commutation", 1e-4}}}},
        {"approx-identity", {2, 128, 16.0 * kPi, 2, 0.5, 1, {{"final", 0.1}, {"normalization", 1e-10}, {"pointwise", 1e-12}}}},
        {"heisenberg-conjugation",
         {2, 32, 6.0, 2, 0.0, 2,
          {{"t_independence", 1e-10}, {"covariance", 1e-5}, {"isometry", 1e-10}, {"roundtrip", 1e-10}, {"probe", 1e-3}, {"probe_step_ratio", 0.05}}}},
        {"heissmooth", {2, 32, 6.0, 2, 0.5, 2, {{"heissmooth", 1e-4}, {"separation", 1e-2}}}},
        {"commutant",
         {2, 32, aligned_half_width(0.5, 32), 2, 0.5, 2,
          {{"commutation", 1e-4}, {"symbol", 1e-6}, {"extraction", 1e-3}, {"separation", 1e-2}}}},
    };
    return table;
}

const ScenarioDefaults& defaults_for(const std::string& scenario) {
    const auto& table = defaults_table();
    const auto it = table.find(scenario);
    if (it == table.end()) throw InvalidInput("unknown scenario '" + scenario + "'");
    return it->second;
}

bool uses_epsilons(const std::string& scenario) { return scenario == "adjoint-symbol" || scenario == "deformed-product"; }

// ------------------------------------------------------------------ helpers

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
        start_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::uint64_t stream_seed(const ScenarioConfig& c, std::uint64_t stream) { return Rng(c.seed).split(stream).next_u64(); }

const char* recipe_for(int t) {
    static const char* recipes[] = {"gaussian", "modulated-gaussian", "bump"};
    return recipes[t % 3];
}

double max_diff(const ModuleFunction& f, const ModuleFunction& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto d = f.at(i) - g.at(i);
        m = std::max(m, cstar_norm(d));
    }
    return m;
}

// Gaussian with a random matrix coefficient, centered near the origin and
// scaled to the box.
TestFunction box_gaussian(const GridSpec& g, int k, std::uint64_t seed, double width_fraction = 0.15) {
    Rng rng(seed);
    Point c{};
    for (int a = 0; a < g.n(); ++a) c[static_cast<std::size_t>(a)] = rng.uniform(-0.2, 0.2);
    return TestFunction::gaussian(g.n(), AlgebraElement::random(k, rng), c, width_fraction * g.half_width());
}

SampledSymbol identity_symbol(const GridSpec& g, int k) {
    return SampledSymbol::sample(g, g.dual(), k, DecayClass::bounded, [k](const Point&, const Point&, std::span<Complex> out) {
        std::fill(out.begin(), out.end(), Complex{});
        for (int d = 0; d < k; ++d) out[static_cast<std::size_t>(d * k + d)] = 1.0;
    });
}

// ------------------------------------------------------------------ scenarios

void run_fourier_unitarity(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    double inner = 0.0, round = 0.0, norm = 0.0, direct = 0.0;
    for (int t = 0; t < c.trial_count; ++t) {
        const auto f = make_test_function(recipe_for(t), g, stream_seed(c, 2 * static_cast<std::uint64_t>(t)), c.k);
        const auto h = make_test_function(recipe_for(t + 1), g, stream_seed(c, 2 * static_cast<std::uint64_t>(t) + 1), c.k);
        const auto fh = fourier(f);
        const auto hh = fourier(h);
        const double nf = module_norm(f);
        const double dev = cstar_norm(module_inner(f, h) - module_inner(fh, hh)) / (nf * module_norm(h) + 1.0);
        r.add_series("inner_deviation", t, dev);
        inner = std::max(inner, dev);
        round = std::max(round, max_diff(inverse_fourier(fh), f) / f.sup_norm());
        norm = std::max(norm, std::abs(module_norm(fh) - nf) / nf);
        if (c.oracle && t < 3) direct = std::max(direct, max_diff(fourier_direct(f), fh) / fh.sup_norm());
    }
    r.add_metric("max_inner_deviation", inner, c.tolerance("unitarity"), Comparison::le,
                 "||<f,g> - <f^,g^>|| / (||f|| ||g|| + 1)");
    r.add_metric("max_roundtrip_error", round, c.tolerance("roundtrip"), Comparison::le, "sup |F^-1 F f - f| / sup |f|");
    r.add_metric("max_norm_deviation", norm, c.tolerance("norm"), Comparison::le, "| ||f^|| - ||f|| | / ||f||");
    if (c.oracle)
        r.add_metric("oracle_transform_deviation", direct, c.tolerance("oracle"), Comparison::le,
                     "FFT against the direct sum, first three trials");
}

void run_cv_bound(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const double l_config = c.tolerance("l_config");
    const bool identity = c.symbol == "identity";
    double worst = 0.0, scaling = 0.0, oracle = 0.0;
    const int count = identity ? 1 : c.trial_count;
    for (int t = 0; t < count; ++t) {
        const std::uint64_t s = stream_seed(c, static_cast<std::uint64_t>(t));
        const SampledSymbol a = identity ? identity_symbol(g, c.k) : make_test_symbol(g.n(), c.k, s).sample(g, g.dual());
        const double pa = pi_seminorm(a);
        const double est = operator_norm_estimate(a, 500, s, 1e-10).value;
        const double ratio = est / pa;
        const SampledSymbol a5 = Complex(5.0) * a;
        const double ratio5 = operator_norm_estimate(a5, 500, s, 1e-10).value / pi_seminorm(a5);
        r.add_series("norm_ratio", t, ratio);
        worst = std::max(worst, ratio);
        scaling = std::max(scaling, std::abs(ratio5 - ratio) / ratio);

        const auto check = cv_bound_check(a, 4, s, l_config);
        for (const auto& p : check.series()) r.add_series("test_function_ratio", t, p.value);
        if (c.oracle) {
            const auto phi = make_test_function("gaussian", g, s, c.k);
            oracle = std::max(oracle, max_diff(quantize_apply_direct(a, phi), quantize_apply(a, phi)) / phi.sup_norm());
        }
    }
    r.add_metric("max_ratio", worst, l_config, Comparison::le, "operator norm estimate / pi(a)");
    r.add_metric("scaling_deviation", scaling, c.tolerance("scaling"), Comparison::le, "ratio(5a) against ratio(a)");
    if (identity)
        r.add_metric("identity_deviation", std::abs(worst - 1.0), c.tolerance("identity"), Comparison::le,
                     "a = I must give ratio 1");
    if (c.oracle)
        r.add_metric("oracle_quantization_deviation", oracle, c.tolerance("oracle"), Comparison::le,
                     "fast against direct quantization");
}

void run_windowed_transform(const ScenarioConfig& c, VerificationReport& r) {
    if (c.n != 1) throw InvalidInput("windowed-transform supports n = 1 only");
    const GridSpec g = c.grid();
    // The window decays like 1/|x|; the x box must be far wider than phi's.
    const GridSpec xg(1, 2048.0 * c.L, 1024 * c.N);
    double worst = 0.0;
    for (int t = 0; t < c.trial_count; ++t) {
        const auto phi = make_test_function(recipe_for(t), g, stream_seed(c, static_cast<std::uint64_t>(t)), c.k);
        const auto ff = module_inner(phi, phi);
        const auto gram = windowed_gram(phi, xg);
        const double dev = cstar_norm(gram - kPi * ff) / (kPi * cstar_norm(ff));
        r.add_series("relative_deviation", t, dev);
        worst = std::max(worst, dev);
    }
    r.add_metric("max_relative_deviation", worst, c.tolerance("identity"), Comparison::le,
                 "|int int g* g - pi <phi,phi>| relative to pi ||<phi,phi>||");
}

void run_adjoint_symbol(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const auto a = make_test_symbol(g.n(), c.k, stream_seed(c, 0)).sample(g, g.dual());
    RegularizationSchedule schedule;
    schedule.epsilons = c.epsilon_schedule;
    schedule.tolerance = c.tolerance("convergence");
    const auto res = adjoint_symbol(a, schedule);
    for (std::size_t i = 0; i < res.trace.size(); ++i) r.add_series("convergence_trace", schedule.epsilons[i + 1], res.trace[i]);
    r.add_metric("converged", 1.0, 1.0, Comparison::ge, "extrapolation met its tolerance");
    r.add_metric("trace_last", res.trace.back(), c.tolerance("convergence"), Comparison::le,
                 "last successive difference relative to max(1, sup ||a||)");
    double worst = 0.0, oracle = 0.0;
    for (int t = 0; t < c.trial_count; ++t) {
        const auto phi = make_test_function(recipe_for(t), g, stream_seed(c, 1 + 2 * static_cast<std::uint64_t>(t)), c.k);
        const auto psi = make_test_function(recipe_for(t + 1), g, stream_seed(c, 2 + 2 * static_cast<std::uint64_t>(t)), c.k);
        const auto lhs = module_inner(quantize_apply(a, phi), psi);
        const auto rhs = module_inner(phi, quantize_apply(res.p, psi));
        const double dev = cstar_norm(lhs - rhs) / (module_norm(phi) * module_norm(psi));
        r.add_series("pair_deviation", t, dev);
        worst = std::max(worst, dev);
        if (c.oracle && t < 2)
            oracle = std::max(oracle, max_diff(quantize_apply_direct(res.p, psi), quantize_apply(res.p, psi)) / psi.sup_norm());
    }
    r.add_metric("max_adjoint_deviation", worst, c.tolerance("adjoint"), Comparison::le,
                 "||<O(a) phi, psi> - <phi, O(p) psi>|| / (||phi|| ||psi||)");
    if (c.oracle)
        r.add_metric("oracle_quantization_deviation", oracle, c.tolerance("oracle"), Comparison::le,
                     "fast against direct quantization");
}

void run_operb_roundtrip(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const int k = c.k;
    const auto a = SampledSymbol::sample(g, g, k, DecayClass::schwartz, [&](const Point& x, const Point& xi, std::span<Complex> out) {
        double s = 0.0;
        for (int d = 0; d < g.n(); ++d) s += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)] + xi[static_cast<std::size_t>(d)] * xi[static_cast<std::size_t>(d)];
        std::fill(out.begin(), out.end(), Complex{});
        for (int d = 0; d < k; ++d) out[static_cast<std::size_t>(d * k + d)] = std::exp(-s);
    });
    const auto rc = operb_reconstruct(operb_transform(a));
    if (rc.kernel_truncated) r.add_warning("reconstruction kernel reached past the box");
    const double inner = 0.6 * g.half_width();
    auto interior = [&](const Point& p) {
        for (int d = 0; d < g.n(); ++d)
            if (std::abs(p[static_cast<std::size_t>(d)]) >= inner) return false;
        return true;
    };
    double err = 0.0;
    for (std::size_t ix = 0; ix < g.size(); ++ix) {
        const Point x = g.point(ix);
        if (!interior(x)) continue;
        double row = 0.0;
        for (std::size_t ixi = 0; ixi < g.size(); ++ixi)
            if (interior(g.point(ixi))) row = std::max(row, cstar_norm(rc.a.at(ix, ixi) - a.at(ix, ixi)));
        if (g.n() == 1) r.add_series("error_profile", x[0], row);
        err = std::max(err, row);
    }
    r.add_metric("interior_relative_error", err / a.sup_norm(), c.tolerance("roundtrip"), Comparison::le,
                 "sup over the central 60% box of |reconstruct(transform(a)) - a| / sup |a|");
}

void run_deformed_product(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const DeformationMatrix J = c.deformation();
    const DeformationMatrix J0 = DeformationMatrix::zero(g.n());
    BruteForceOptions bf;
    bf.epsilons = c.epsilon_schedule;

    double pointwise = 0.0, brute = 0.0, assoc = 0.0, comm = 0.0;
    int probe = 0;
    for (int t = 0; t < c.trial_count; ++t) {
        const std::uint64_t base = 10 * static_cast<std::uint64_t>(t);
        const auto Fs = box_gaussian(g, c.k, stream_seed(c, base));
        const auto Gs = box_gaussian(g, c.k, stream_seed(c, base + 1));
        const auto Hs = box_gaussian(g, c.k, stream_seed(c, base + 2));
        const auto F = Fs.sample(g), G = Gs.sample(g), H = Hs.sample(g);

        const auto field = make_test_function("bounded-field", g, stream_seed(c, base + 3), c.k);
        for (const auto& [P, Q] : {std::pair{&field, &G}, std::pair{&F, &G}}) {
            const auto prod = deformed_product(*P, *Q, J0);
            double d = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) d = std::max(d, cstar_norm(prod.at(i) - P->at(i) * Q->at(i)));
            pointwise = std::max(pointwise, d);
        }

        const auto FG = deformed_product(F, G, J);
        Rng pick(stream_seed(c, base + 4));
        const int points = c.oracle ? 12 : 3;
        const int N = g.points_per_axis();
        for (int p = 0; p < points; ++p) {
            std::array<int, kMaxDim> idx{};
            for (int a = 0; a < g.n(); ++a)
                idx[static_cast<std::size_t>(a)] = N / 2 + static_cast<int>(std::floor(pick.uniform(-0.15, 0.15) * N));
            const std::size_t i = g.flat_index(idx);
            const double d = cstar_norm(deformed_product_bruteforce(Fs, Gs, J, g.point(i), bf) - FG.at(i));
            r.add_series("bruteforce_deviation", probe++, d);
            brute = std::max(brute, d);
        }

        const auto lhs = deformed_product(FG, H, J);
        const auto rhs = deformed_product(F, deformed_product(G, H, J), J);
        assoc = std::max(assoc, max_diff(lhs, rhs) / (F.sup_norm() * G.sup_norm() * H.sup_norm()));

        const auto phi = make_test_function("modulated-gaussian", g, stream_seed(c, base + 5), c.k);
        comm = std::max(comm, module_norm(commutator_apply(F, H, phi, J)) / module_norm(phi));
    }
    r.add_metric("undeformed_pointwise", pointwise, c.tolerance("pointwise"), Comparison::le, "J = 0 against F(x) G(x)");
    r.add_metric("bruteforce_deviation", brute, c.tolerance("bruteforce"), Comparison::le,
                 "spectral product against the damped double integral");
    r.add_metric("associativity", assoc, c.tolerance("associativity"), Comparison::le,
                 "sup |(F G) H - F (G H)| / (sup F sup G sup H)");
    r.add_metric("lr_commutation", comm, c.tolerance("commutation"), Comparison::le, "||[L_F, R_H] phi|| / ||phi||");
}

void run_approx_identity(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec freq = c.grid().dual();
    const GridSpec x = freq.dual();
    const DeformationMatrix J = c.deformation();
    TestFunction phis(x.n(), c.k, DecayClass::schwartz);
    TestFunction::Term term;
    term.width = 2.0;
    term.slope = {0.3, 0.0};
    Rng rng(stream_seed(c, 0));
    term.coeff = AlgebraElement::random(c.k, rng);
    phis.add(term);
    const auto phi = phis.sample(x);
    const double nphi = module_norm(phi);

    double normalization = 0.0, pointwise = 0.0, prev = 0.0, last = 0.0;
    bool decreasing = true;
    const double mass_target = std::pow(2.0 * kPi, 0.5 * x.n());
    for (int k_index : {1, 2, 4}) {
        const auto bump = approximate_identity_bump(k_index, freq, c.k);
        AlgebraElement mass = AlgebraElement::scalar(c.k, 0.0);
        for (std::size_t i = 0; i < bump.size(); ++i) mass = mass + bump.at(i);
        mass = mass * Complex(freq.cell_volume() / mass_target);
        normalization = std::max(normalization, cstar_norm(mass - AlgebraElement::identity(c.k)));

        const auto ek = approximate_identity(k_index, freq, c.k);
        const double err = module_norm(deformed_product(ek, phi, J) - phi) / nphi;
        r.add_series("relative_error", k_index, err);
        if (k_index > 1 && !(err < prev)) decreasing = false;
        prev = err;
        last = err;

        const auto plain = deformed_product(ek, phi, DeformationMatrix::zero(x.n()));
        for (std::size_t i = 0; i < x.size(); ++i) pointwise = std::max(pointwise, cstar_norm(plain.at(i) - ek.at(i) * phi.at(i)));
    }
    r.add_metric("normalization", normalization, c.tolerance("normalization"), Comparison::le,
                 "bump mass against (2 pi)^{n/2} u_k");
    r.add_metric("strictly_decreasing", decreasing ? 1.0 : 0.0, 1.0, Comparison::ge,
                 "||e_k x_J phi - phi|| over k = 1, 2, 4");
    r.add_metric("final_relative_error", last, c.tolerance("final"), Comparison::le, "k = 4, relative to ||phi||");
    r.add_metric("undeformed_pointwise", pointwise, c.tolerance("pointwise"), Comparison::le, "J = 0 against e_k(x) phi(x)");
}

void run_heisenberg_conjugation(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const int n = g.n();
    const auto sym = make_test_symbol(n, c.k, stream_seed(c, 0));
    const SymbolFunction a = [sym](const Point& x, const Point& xi, std::span<Complex> out) { sym.evaluate(x, xi, out); };
    const double h = g.spacing();
    const double dxi = g.dual().spacing();
    Point z{}, zeta{};
    z[0] = 2 * h;
    zeta[0] = dxi;
    if (n == 2) {
        z[1] = -h;
        zeta[1] = 2 * dxi;
    }
    const SymbolFunction shifted = [sym, z, zeta](const Point& x, const Point& xi, std::span<Complex> out) {
        Point xs{}, xis{};
        for (std::size_t d = 0; d < xs.size(); ++d) {
            xs[d] = x[d] + z[d];
            xis[d] = xi[d] + zeta[d];
        }
        sym.evaluate(xs, xis, out);
    };
    const auto T = OperatorHandle::from_symbol(a, c.k);
    const auto Tz = OperatorHandle::from_symbol(shifted, c.k);

    double iso = 0.0, round = 0.0, tind = 0.0, cov = 0.0;
    for (int t = 0; t < c.trial_count; ++t) {
        const auto phi = box_gaussian(g, c.k, stream_seed(c, 1 + static_cast<std::uint64_t>(t)), 0.11).sample(g);
        const double nphi = module_norm(phi);
        const auto Ephi = heisenberg_translate(phi, z, zeta, 0.7);
        iso = std::max(iso, std::abs(module_norm(Ephi) - nphi) / nphi);
        round = std::max(round, max_diff(heisenberg_translate_inverse(Ephi, z, zeta, 0.7), phi) / phi.sup_norm());
        const auto c0 = conjugate_operator(T, z, zeta, 0.0)(phi);
        const auto c1 = conjugate_operator(T, z, zeta, 1.3)(phi);
        tind = std::max(tind, module_norm(c0 - c1) / nphi);
        const double d = module_norm(c0 - Tz(phi)) / nphi;
        r.add_series("covariance", t, d);
        cov = std::max(cov, d);
    }
    r.add_metric("isometry", iso, c.tolerance("isometry"), Comparison::le, "| ||E phi|| - ||phi|| | / ||phi||");
    r.add_metric("roundtrip", round, c.tolerance("roundtrip"), Comparison::le, "sup |E^-1 E phi - phi| / sup |phi|");
    r.add_metric("t_independence", tind, c.tolerance("t_independence"), Comparison::le, "t = 0 against t = 1.3");
    r.add_metric("covariance", cov, c.tolerance("covariance"), Comparison::le,
                 "E^-1 O(a) E against O(a(x + z, xi + zeta))");

    // Remark on derivatives of T_{z,zeta}: a one-dimensional probe.
    const GridSpec line(1, 8.0, 1024);
    const SymbolFunction gauss = [](const Point& x, const Point& xi, std::span<Complex> out) {
        const double v = std::exp(-x[0] * x[0] - xi[0] * xi[0]);
        std::fill(out.begin(), out.end(), Complex{});
        out[0] = v;
        out[3] = v;
    };
    const SymbolFunction dx_gauss = [](const Point& x, const Point& xi, std::span<Complex> out) {
        const double v = -2.0 * x[0] * std::exp(-x[0] * x[0] - xi[0] * xi[0]);
        std::fill(out.begin(), out.end(), Complex{});
        out[0] = v;
        out[3] = v;
    };
    const auto A = OperatorHandle::from_symbol(gauss, 2);
    const OperatorFamily family = [A](const Point& zz, const Point& ww) { return conjugate_operator(A, zz, ww); };
    const auto phi = TestFunction::gaussian(1, AlgebraElement::identity(2), {0.2}, 1.0).sample(line);
    const auto probe = smoothness_probe(family, phi, {{1, 0}, {0, 0}}, 2 * line.spacing());
    const auto exact = quantize_apply(dx_gauss, 2, phi);
    r.add_metric("probe_derivative_error", module_norm(probe - exact), c.tolerance("probe"), Comparison::le,
                 "z-derivative of T_{z,0} phi against O(d_x a) phi at step 2h");
    const double coarse = module_norm(smoothness_probe(family, phi, {{1, 0}, {1, 0}}, 8 * line.spacing()));
    const double fine = module_norm(smoothness_probe(family, phi, {{1, 0}, {1, 0}}, 4 * line.spacing()));
    r.add_metric("probe_step_ratio", std::abs(coarse / fine - 1.0), c.tolerance("probe_step_ratio"), Comparison::le,
                 "mixed derivative norm under step halving");
}

std::vector<PhaseSpaceShift> heissmooth_samples(int n) {
    if (n == 1) return {{{0.0}, {0.0}}, {{0.3}, {0.0}}, {{0.0}, {0.8}}, {{-0.4}, {0.5}}, {{0.2}, {-1.0}}};
    return {{{0.0, 0.0}, {0.0, 0.0}}, {{0.3, 0.0}, {0.0, 0.0}}, {{0.0, 0.0}, {0.8, 0.0}},
            {{0.2, -0.4}, {0.5, -0.6}}, {{-0.5, 0.25}, {-1.0, 0.7}}};
}

void run_heissmooth(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const DeformationMatrix J = c.deformation();
    const auto F = box_gaussian(g, c.k, stream_seed(c, 0), 0.13).sample(g);
    std::vector<ModuleFunction> phis;
    for (int t = 0; t < c.trial_count; ++t)
        phis.push_back(box_gaussian(g, c.k, stream_seed(c, 1 + static_cast<std::uint64_t>(t)), 0.13).sample(g));
    const auto samples = heissmooth_samples(g.n());

    r.absorb(heissmooth_check(OperatorHandle::left_rep(F, J), J, samples, phis, c.tolerance("heissmooth")));

    const int k = c.k;
    const double w = 0.15 * g.half_width();
    const int n = g.n();
    const SymbolFunction a0 = [k, w, n](const Point& x, const Point&, std::span<Complex> out) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
        const double v = std::exp(-0.5 * s / (w * w));
        std::fill(out.begin(), out.end(), Complex{});
        for (int d = 0; d < k; ++d) out[static_cast<std::size_t>(d * k + d)] = v;
    };
    const auto counter = heissmooth_check(OperatorHandle::from_symbol(a0, k), J, samples, phis);
    for (const auto& p : counter.series()) r.add_series("counterexample_deviation", p.x, p.value);
    r.add_metric("counterexample_deviation", counter.metric("max_relative_deviation").value, c.tolerance("separation"),
                 Comparison::ge, "a0(x) I violates a(z, zeta) = a(z - J zeta, 0)");
}

void run_commutant(const ScenarioConfig& c, VerificationReport& r) {
    const GridSpec g = c.grid();
    const DeformationMatrix J = c.deformation();
    const int k = c.k;
    const auto Fs = box_gaussian(g, k, stream_seed(c, 0));
    const auto a = SampledSymbol::sample(g, g.dual(), k, DecayClass::bounded, [&](const Point& x, const Point& xi, std::span<Complex> out) {
        const Point s = J.apply(xi);
        Point y{};
        for (std::size_t d = 0; d < y.size(); ++d) y[d] = x[d] - s[d];
        Fs.evaluate(y, out);
    });
    std::vector<ModuleFunction> Gs{box_gaussian(g, k, stream_seed(c, 1)).sample(g), box_gaussian(g, k, stream_seed(c, 2)).sample(g)};
    std::vector<ModuleFunction> phis;
    for (int t = 0; t < c.trial_count; ++t)
        phis.push_back(make_test_function(recipe_for(t), g, stream_seed(c, 3 + static_cast<std::uint64_t>(t)), k));

    CommutantOptions opt;
    opt.commutation_tolerance = c.tolerance("commutation");
    opt.symbol_tolerance = c.tolerance("symbol");
    opt.extraction_tolerance = c.tolerance("extraction");
    opt.separation = c.tolerance("separation");
    r.absorb(commutant_check(OperatorHandle::from_symbol(a), J, Gs, phis, opt), "symbol_form.");
    r.add_metric("symbol_form.field_recovery", max_diff(extract_field(a), Fs.sample(g)), opt.symbol_tolerance,
                 Comparison::le, "F(z) = a(z, 0) against the generating field");

    const double w = 0.15 * g.half_width();
    const auto x_only = SampledSymbol::sample(g, g.dual(), k, DecayClass::bounded, [&](const Point& x, const Point&, std::span<Complex> out) {
        double s = 0.0;
        for (int d = 0; d < g.n(); ++d) s += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
        std::fill(out.begin(), out.end(), Complex{});
        for (int d = 0; d < k; ++d) out[static_cast<std::size_t>(d * k + d)] = std::exp(-0.5 * s / (w * w));
    });
    CommutantOptions counter = opt;
    counter.expect_commuting = false;
    r.absorb(commutant_check(OperatorHandle::from_symbol(x_only), J, Gs, phis, counter), "x_only.");

    // Baseline: T = R_G from the symbol G(x + J xi); right representations
    // commute with each other only where the deformed algebra does.
    const auto Gr = box_gaussian(g, k, stream_seed(c, 1));
    const auto b = SampledSymbol::sample(g, g.dual(), k, DecayClass::bounded, [&](const Point& x, const Point& xi, std::span<Complex> out) {
        const Point s = J.apply(xi);
        Point y{};
        for (std::size_t d = 0; d < y.size(); ++d) y[d] = x[d] + s[d];
        Gr.evaluate(y, out);
    });
    const auto TB = OperatorHandle::from_symbol(b, SymbolSide::right);
    const auto RG = OperatorHandle::right_rep(Gs[1], J);
    for (std::size_t t = 0; t < phis.size(); ++t)
        r.add_series("right_rep_baseline", static_cast<double>(t),
                     module_norm(commutator(TB, RG)(phis[t])) / module_norm(phis[t]));
}

using ScenarioFn = void (*)(const ScenarioConfig&, VerificationReport&);

const std::vector<std::pair<std::string, ScenarioFn>>& registry() {
    static const std::vector<std::pair<std::string, ScenarioFn>> r{
        {"fourier-unitarity", run_fourier_unitarity},
        {"cv-bound", run_cv_bound},
        {"windowed-transform", run_windowed_transform},
        {"adjoint-symbol", run_adjoint_symbol},
        {"operb-roundtrip", run_operb_roundtrip},
        {"deformed-product", run_deformed_product},
        {"approx-identity", run_approx_identity},
        {"heisenberg-conjugation", run_heisenberg_conjugation},
        {"heissmooth", run_heissmooth},
        {"commutant", run_commutant},
    };
    return r;
}

// ------------------------------------------------------------------ parsing

int get_int(const json& v, const char* key) {
    if (!v.is_number_integer()) throw InvalidInput(std::string("config field '") + key + "' must be an integer");
    return v.get<int>();
}

double get_number(const json& v, const char* key) {
    if (!v.is_number()) throw InvalidInput(std::string("config field '") + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

// ---------------------------------------------------------------- public API

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, fn] : registry()) v.push_back(name);
        return v;
    }();
    return names;
}

GridSpec ScenarioConfig::grid() const { return GridSpec(n, L, N); }

DeformationMatrix ScenarioConfig::deformation() const {
    if (J) return DeformationMatrix(n, *J);
    if (n == 1) {
        if (theta != 0.0) throw InvalidInput("theta must be 0 for n = 1");
        return DeformationMatrix::zero(1);
    }
    return DeformationMatrix::standard(theta);
}

double ScenarioConfig::tolerance(const std::string& name) const {
    const auto it = tolerances.find(name);
    if (it == tolerances.end()) throw InvalidInput("scenario '" + scenario + "' has no tolerance named '" + name + "'");
    return it->second;
}

ScenarioConfig default_config(const std::string& scenario) {
    const ScenarioDefaults& d = defaults_for(scenario);
    ScenarioConfig c;
    c.scenario = scenario;
    c.n = d.n;
    c.N = d.N;
    c.L = d.L;
    c.k = d.k;
    c.theta = d.theta;
    c.trial_count = d.trials;
    for (const auto& [name, value] : d.tolerances) c.tolerances[name] = value;
    if (scenario == "cv-bound") c.tolerances["l_config"] = default_l_config(c.n);
    if (scenario == "adjoint-symbol") c.epsilon_schedule = RegularizationSchedule{}.epsilons;
    if (scenario == "deformed-product") c.epsilon_schedule = BruteForceOptions{}.epsilons;
    return c;
}

ScenarioConfig parse_config(const json& doc, const std::string& scenario) {
    ScenarioConfig c = default_config(scenario);
    if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
    if (!doc.contains("schema_version")) throw InvalidInput("config needs \"schema_version\": 1");
    if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kConfigSchemaVersion)
        throw InvalidInput("unsupported schema_version (expected 1)");

    static const std::set<std::string> known{"schema_version", "scenario", "n", "N", "L", "k", "theta", "J", "seed",
                                             "trial_count", "symbol", "tolerances", "epsilon_schedule", "oracle"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key)) throw InvalidInput("unknown config field '" + key + "'");

    if (doc.contains("scenario")) {
        if (!doc["scenario"].is_string() || doc["scenario"].get<std::string>() != scenario)
            throw InvalidInput("config is for scenario '" + doc["scenario"].dump() + "', not '" + scenario + "'");
    }
    bool explicit_L = false;
    if (doc.contains("n")) c.n = get_int(doc["n"], "n");
    if (doc.contains("N")) c.N = get_int(doc["N"], "N");
    if (doc.contains("L")) {
        c.L = get_number(doc["L"], "L");
        explicit_L = true;
    }
    if (doc.contains("k")) c.k = get_int(doc["k"], "k");
    if (doc.contains("theta")) c.theta = get_number(doc["theta"], "theta");
    if (doc.contains("J")) {
        if (doc.contains("theta")) throw InvalidInput("give either theta or J, not both");
        const json& rows = doc["J"];
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(c.n))
            throw InvalidInput("J must be an n x n array of rows");
        std::array<double, 4> e{};
        for (int i = 0; i < c.n; ++i) {
            const json& row = rows[static_cast<std::size_t>(i)];
            if (!row.is_array() || row.size() != static_cast<std::size_t>(c.n))
                throw InvalidInput("J must be an n x n array of rows");
            for (int j = 0; j < c.n; ++j) e[static_cast<std::size_t>(i * 2 + j)] = get_number(row[static_cast<std::size_t>(j)], "J");
        }
        c.J = e;
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw InvalidInput("config field 'seed' must be a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("trial_count")) {
        c.trial_count = get_int(doc["trial_count"], "trial_count");
        if (c.trial_count < 1) throw InvalidInput("trial_count must be positive");
    }
    if (doc.contains("symbol")) {
        if (scenario != "cv-bound") throw InvalidInput("'symbol' applies to cv-bound only");
        if (!doc["symbol"].is_string()) throw InvalidInput("config field 'symbol' must be a string");
        c.symbol = doc["symbol"].get<std::string>();
        if (c.symbol != "random" && c.symbol != "identity") throw InvalidInput("symbol must be \"random\" or \"identity\"");
    }
    if (doc.contains("oracle")) {
        if (!doc["oracle"].is_boolean()) throw InvalidInput("config field 'oracle' must be a boolean");
        c.oracle = doc["oracle"].get<bool>();
    }
    if (doc.contains("tolerances")) {
        if (!doc["tolerances"].is_object()) throw InvalidInput("tolerances must be an object");
        for (const auto& [name, value] : doc["tolerances"].items()) {
            if (!c.tolerances.count(name))
                throw InvalidInput("scenario '" + scenario + "' has no tolerance named '" + name + "'");
            c.tolerances[name] = get_number(value, "tolerances");
        }
    }
    if (doc.contains("epsilon_schedule")) {
        if (!uses_epsilons(scenario)) throw InvalidInput("scenario '" + scenario + "' takes no epsilon_schedule");
        if (!doc["epsilon_schedule"].is_array()) throw InvalidInput("epsilon_schedule must be an array");
        c.epsilon_schedule.clear();
        for (const auto& v : doc["epsilon_schedule"]) c.epsilon_schedule.push_back(get_number(v, "epsilon_schedule"));
        if (c.epsilon_schedule.size() < 2) throw InvalidInput("epsilon_schedule needs at least two levels");
        for (std::size_t i = 0; i < c.epsilon_schedule.size(); ++i)
            if (!(c.epsilon_schedule[i] > 0.0) || (i > 0 && !(c.epsilon_schedule[i] < c.epsilon_schedule[i - 1])))
                throw InvalidInput("epsilon_schedule must be positive and strictly decreasing");
    }

    if (c.n < 1 || c.n > 2) throw InvalidInput("n must be 1 or 2");
    if (c.k < 1) throw InvalidInput("k must be positive");
    if (scenario == "commutant" && !explicit_L) {
        const double t = c.J ? (*c.J)[1] : c.theta;
        if (c.n == 2 && t != 0.0) c.L = aligned_half_width(t, c.N);
    }
    if (scenario == "cv-bound" && !(doc.contains("tolerances") && doc["tolerances"].contains("l_config")))
        c.tolerances["l_config"] = default_l_config(c.n);
    (void)c.grid();
    (void)c.deformation();
    return c;
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["scenario"] = c.scenario;
    j["n"] = c.n;
    j["N"] = c.N;
    j["L"] = c.L;
    j["k"] = c.k;
    if (c.J) {
        json rows = json::array();
        for (int i = 0; i < c.n; ++i) {
            json row = json::array();
            for (int k = 0; k < c.n; ++k) row.push_back((*c.J)[static_cast<std::size_t>(i * 2 + k)]);
            rows.push_back(row);
        }
        j["J"] = rows;
    } else {
        j["theta"] = c.theta;
    }
    j["seed"] = c.seed;
    j["trial_count"] = c.trial_count;
    if (c.scenario == "cv-bound") j["symbol"] = c.symbol;
    json tol = json::object();
    for (const auto& [name, value] : c.tolerances) tol[name] = value;
    j["tolerances"] = tol;
    if (!c.epsilon_schedule.empty()) j["epsilon_schedule"] = c.epsilon_schedule;
    j["oracle"] = c.oracle;
    return j;
}

VerificationReport run_scenario(const ScenarioConfig& config) {
    const auto& reg = registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == config.scenario; });
    if (it == reg.end()) throw InvalidInput("unknown scenario '" + config.scenario + "'");
    VerificationReport report(config.scenario);
    report.set_config(to_json(config));
    Stopwatch clock;
    try {
        it->second(config, report);
    } catch (const ConvergenceError& e) {
        for (std::size_t i = 0; i < e.trace().size(); ++i) report.add_series("convergence_trace", static_cast<double>(i), e.trace()[i]);
        report.add_warning(e.what());
        if (report.has_metric("converged")) throw;
        report.add_metric("converged", 0.0, 1.0, Comparison::ge, "extrapolation missed its tolerance");
    }
    report.add_timing("total", clock.lap_ms());
    return report;
}

bool convergence_failed(const VerificationReport& report) {
    return report.has_metric("converged") && !report.metric("converged").pass;
}

}  // namespace pdo
