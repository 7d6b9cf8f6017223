#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pdo/error.hpp"
#include "pdo/grid.hpp"
#include "pdo/rng.hpp"
#include "pdo/sampling.hpp"
#include "pdo/test_functions.hpp"

using namespace pdo;

namespace {

// Composite Simpson rule for int_{-b}^{b} e^{-x^2} dx.
double simpson_gauss(double b, int panels) {
    const double h = 2.0 * b / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double x = -b + i * h;
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::exp(-x * x);
    }
    return s * h / 3.0;
}

double min_hermitian_eigenvalue(const AlgebraElement& a) {
    const Matrix herm = 0.5 * (a.matrix() + a.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("grid geometry") {
    const GridSpec g(1, 10.0, 256);
    CHECK(g.spacing() * g.points_per_axis() == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(g.coordinate(0) == -10.0);
    CHECK(g.coordinate(g.origin_index()) == 0.0);
    const GridSpec d = g.dual();
    CHECK(d.spacing() == doctest::Approx(std::numbers::pi / 10.0).epsilon(1e-14));
    CHECK(d.half_width() == doctest::Approx(std::numbers::pi / g.spacing()).epsilon(1e-14));
    CHECK(d.dual() == g);

    const GridSpec g2(2, 6.0, 64);
    CHECK(g2.size() == 4096u);
    for (std::size_t i : {0u, 17u, 4095u, 2080u}) CHECK(g2.flat_index(g2.multi_index(i)) == i);
    CHECK(g2.point(1)[1] == doctest::Approx(-6.0 + g2.spacing()));
    CHECK(g2.point(64)[0] == doctest::Approx(-6.0 + g2.spacing()));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec(3, 1.0, 8), InvalidInput);
    CHECK_THROWS_AS(GridSpec(1, 1.0, 12), InvalidInput);
    CHECK_THROWS_AS(GridSpec(1, -1.0, 8), InvalidInput);
    CHECK_THROWS_AS(GridSpec(1, std::nan(""), 8), InvalidInput);
}

TEST_CASE("rng reproduces the documented counter scheme") {
    // Reference values from an independent implementation of the scheme in
    // the README.
    Rng r0(0);
    CHECK(r0.next_u64() == 0xa706dd2f4d197e6fULL);
    CHECK(r0.next_u64() == 0xb382a305f4414f5eULL);
    CHECK(r0.next_u64() == 0x631a9154fbabf717ULL);
    Rng r42(42);
    CHECK(r42.next_u64() == 0x57e1faba65107204ULL);
    Rng child = Rng(7).split(3);
    CHECK(child.next_u64() == 0x8114e33ac8a4955dULL);

    Rng u(9);
    double mean = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double v = u.uniform();
        CHECK((v >= 0.0 && v < 1.0));
        mean += v;
    }
    CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("module_inner of a Gaussian matches high-resolution quadrature") {
    const GridSpec g(1, 10.0, 256);
    const auto f = TestFunction::gaussian(1, AlgebraElement::identity(2)).sample(g);
    const AlgebraElement ip = module_inner(f, f);
    const double oracle = simpson_gauss(12.0, 24000);
    CHECK(std::abs(oracle - std::sqrt(std::numbers::pi)) < 1e-12);
    CHECK(cstar_norm(ip - AlgebraElement::scalar(2, oracle)) <= 1e-6);
}

TEST_CASE("module_inner of disjointly supported functions vanishes") {
    const GridSpec g(1, 10.0, 256);
    Rng rng(1);
    const AlgebraElement a = AlgebraElement::random(2, rng);
    const AlgebraElement b = AlgebraElement::random(2, rng);
    auto f = ModuleFunction::sample(g, 2, DecayClass::schwartz, [&](const Point& x, std::span<Complex> out) {
        if (x[0] < -1.0 && x[0] > -3.0) std::copy(a.block().begin(), a.block().end(), out.begin());
    });
    auto h = ModuleFunction::sample(g, 2, DecayClass::schwartz, [&](const Point& x, std::span<Complex> out) {
        if (x[0] > 1.0 && x[0] < 3.0) std::copy(b.block().begin(), b.block().end(), out.begin());
    });
    CHECK(cstar_norm(module_inner(f, h)) == 0.0);
}

TEST_CASE("module inner product structure on random functions") {
    for (int n : {1, 2}) {
        const GridSpec g = n == 1 ? GridSpec(1, 10.0, 256) : GridSpec(2, 6.0, 64);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto f = make_test_function("gaussian", g, seed, 3);
            const auto h = make_test_function("modulated-gaussian", g, seed + 100, 3);
            const AlgebraElement ff = module_inner(f, f);
            const AlgebraElement fh = module_inner(f, h);
            // Hermitian, positive semidefinite Gram element
            CHECK(cstar_norm(ff - ff.adjoint()) <= 1e-12 * cstar_norm(ff));
            CHECK(min_hermitian_eigenvalue(ff) >= -1e-10 * cstar_norm(ff));
            // conjugate symmetry and right A-linearity
            CHECK(cstar_norm(module_inner(h, f) - fh.adjoint()) <= 1e-12 * cstar_norm(fh));
            Rng rng(seed);
            const AlgebraElement a = AlgebraElement::random(3, rng);
            CHECK(cstar_norm(module_inner(f, h.right_multiply(a)) - fh * a) <= 1e-12 * cstar_norm(fh) * cstar_norm(a));
            // Cauchy-Schwarz and norm comparisons
            CHECK(cstar_norm(fh) <= module_norm(f) * module_norm(h) * (1 + 1e-12));
            CHECK(module_norm(f) <= l2_norm(f) * (1 + 1e-12));
            CHECK(module_norm(f.right_multiply(a)) <= module_norm(f) * cstar_norm(a) * (1 + 1e-12));
        }
    }
}

TEST_CASE("scalar module norm is the classical L2 norm") {
    const GridSpec g(1, 10.0, 256);
    const auto f = make_test_function("modulated-gaussian", g, 4, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f.block(i)[0]);
    CHECK(module_norm(f) == doctest::Approx(std::sqrt(s * g.spacing())).epsilon(1e-13));
    CHECK(module_norm(ModuleFunction(g, 2, DecayClass::schwartz)) == 0.0);
}

TEST_CASE("Riemann-sum inner product is stable under mesh and box refinement") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GridSpec coarse(1, 10.0, 256);
        const GridSpec fine(1, 20.0, 512);
        const TestFunction spec = make_test_function_spec("gaussian", coarse, seed);
        const AlgebraElement a = module_inner(spec.sample(coarse), spec.sample(coarse));
        const AlgebraElement b = module_inner(spec.sample(fine), spec.sample(fine));
        CHECK(cstar_norm(a - b) <= 1e-6 * cstar_norm(a));
    }
}

TEST_CASE("test function recipes") {
    const GridSpec g1(1, 10.0, 256);
    const GridSpec g2(2, 6.0, 64);
    const GridSpec g3(2, 5.5, 32);
    for (const GridSpec* g : {&g1, &g2, &g3}) {
        for (const auto& recipe : test_function_recipes()) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const auto f = make_test_function(recipe, *g, seed);
                const auto again = make_test_function(recipe, *g, seed);
                CHECK(f.values() == again.values());
                CHECK(std::isfinite(f.sup_norm()));
                CHECK(f.sup_norm() > 0.0);
                if (recipe == "bounded-field") {
                    CHECK(f.decay_class() == DecayClass::bounded);
                } else {
                    CHECK(f.decay_class() == DecayClass::schwartz);
                    CHECK(f.satisfies_decay());
                }
            }
        }
    }
    CHECK(make_test_function("gaussian", g1, 0).values() != make_test_function("gaussian", g1, 1).values());
    CHECK_THROWS_AS(make_test_function("sawtooth", g1, 0), InvalidInput);
}

TEST_CASE("decay checks") {
    const GridSpec g(1, 10.0, 256);
    const auto bounded = make_test_function("bounded-field", g, 0);
    CHECK_THROWS_AS(bounded.require_schwartz("op"), PreconditionError);
    const auto wide = TestFunction::gaussian(1, AlgebraElement::identity(2), {}, 4.0).sample(g);
    CHECK_FALSE(wide.satisfies_decay());
    CHECK_THROWS_AS(wide.require_schwartz("op"), PreconditionError);
    CHECK_NOTHROW(make_test_function("gaussian", g, 0).require_schwartz("op"));
}

TEST_CASE("module functions reject mismatched shapes") {
    const GridSpec g(1, 10.0, 256);
    const GridSpec other(1, 8.0, 256);
    ModuleFunction f(g, 2, DecayClass::schwartz);
    CHECK_THROWS_AS(module_inner(f, ModuleFunction(other, 2, DecayClass::schwartz)), ShapeError);
    CHECK_THROWS_AS(module_inner(f, ModuleFunction(g, 1, DecayClass::schwartz)), ShapeError);
    CHECK_THROWS_AS(ModuleFunction(g, 2, DecayClass::schwartz, std::vector<Complex>(3)), ShapeError);
    auto sum = f + ModuleFunction(g, 2, DecayClass::bounded);
    CHECK(sum.decay_class() == DecayClass::bounded);
}
