#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pdo/deformation.hpp"
#include "pdo/error.hpp"
#include "pdo/fourier.hpp"
#include "pdo/quantize.hpp"
#include "pdo/rng.hpp"
#include "pdo/test_functions.hpp"

using namespace pdo;

namespace {

const GridSpec kGrid2(2, 6.0, 64);
const GridSpec kCoarse2(2, 6.0, 32);
const DeformationMatrix kJ = DeformationMatrix::standard(0.5);

TestFunction gaussian_field(const AlgebraElement& c, Point center, double width, Point omega = {}) {
    TestFunction f(2, c.dim(), DecayClass::schwartz);
    TestFunction::Term t;
    t.center = center;
    t.width = width;
    t.omega = omega;
    t.coeff = c;
    f.add(t);
    return f;
}

}  // namespace

TEST_CASE("deformation matrix validation") {
    CHECK_NOTHROW(DeformationMatrix(2, {0.0, 1.5, -1.5, 0.0}));
    CHECK_THROWS_AS(DeformationMatrix(2, {0.0, 1.0, 1.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(DeformationMatrix(2, {0.1, 1.0, -1.0, 0.0}), InvalidInput);
    CHECK_THROWS_AS(DeformationMatrix(1, {0.5, 0.0, 0.0, 0.0}), InvalidInput);
    CHECK(DeformationMatrix::zero(1).is_zero());
    const Point ju = kJ.apply({1.0, 2.0});
    CHECK(ju[0] == 1.0);
    CHECK(ju[1] == -0.5);
    const Point jt = kJ.apply_transpose({1.0, 2.0});
    CHECK(jt[0] == -1.0);
    CHECK(jt[1] == 0.5);
}

TEST_CASE("undeformed product is the pointwise product") {
    for (int n : {1, 2}) {
        const GridSpec g = n == 1 ? GridSpec(1, 10.0, 256) : kGrid2;
        const auto F = make_test_function("bounded-field", g, 1);
        const auto G = make_test_function("gaussian", g, 2);
        const auto P = deformed_product(F, G, DeformationMatrix::zero(n));
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, cstar_norm(P.at(i) - F.at(i) * G.at(i)));
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("constant left factor acts by multiplication") {
    Rng rng(5);
    const AlgebraElement c = AlgebraElement::random(2, rng);
    const auto F = TestFunction::constant(2, c).sample(kCoarse2);
    const auto G = make_test_function("modulated-gaussian", kCoarse2, 3);
    CHECK(oracle::max_diff(deformed_product(F, G, kJ), G.left_multiply(c)) <= 1e-8);
    const auto I = TestFunction::constant(2, AlgebraElement::identity(2)).sample(kCoarse2);
    CHECK(oracle::max_diff(left_rep_apply(I, G, kJ), G) <= 1e-8);
    CHECK(oracle::max_diff(right_rep_apply(I, G, kJ), G) <= 1e-8);
}

TEST_CASE("deformed product agrees with the brute-force double integral") {
    const auto Fs = gaussian_field(AlgebraElement::identity(1), {0.2, -0.2}, 0.9);
    TestFunction Gs(2, 1, DecayClass::schwartz);
    TestFunction::Term t;
    t.center = {-0.2, 0.1};
    t.width = 0.8;
    t.slope = {0.5, 0.0};
    t.coeff = AlgebraElement::identity(1);
    Gs.add(t);
    const auto P = deformed_product(Fs.sample(kGrid2), Gs.sample(kGrid2), kJ);
    for (auto idx : {std::array<int, 2>{32, 32}, {30, 34}, {36, 30}, {28, 28}}) {
        const std::size_t i = kGrid2.flat_index(idx);
        const auto brute = deformed_product_bruteforce(Fs, Gs, kJ, kGrid2.point(i));
        CHECK(cstar_norm(brute - P.at(i)) <= 1e-4);
    }
}

TEST_CASE("matrix-valued brute force agreement") {
    Rng rng(8);
    const auto Fs = gaussian_field(AlgebraElement::random(2, rng), {0.2, 0.1}, 0.9, {0.5, -0.3});
    const auto Gs = gaussian_field(AlgebraElement::random(2, rng), {-0.1, 0.2}, 0.85);
    const auto P = deformed_product(Fs.sample(kGrid2), Gs.sample(kGrid2), kJ);
    for (auto idx : {std::array<int, 2>{32, 32}, {29, 35}}) {
        const std::size_t i = kGrid2.flat_index(idx);
        CHECK(cstar_norm(deformed_product_bruteforce(Fs, Gs, kJ, kGrid2.point(i)) - P.at(i)) <= 1e-4);
    }
}

TEST_CASE("left and right representations are pseudodifferential operators") {
    Rng rng(4);
    const auto Fs = gaussian_field(AlgebraElement::random(2, rng), {0.2, -0.1}, 0.9);
    const auto Gs = gaussian_field(AlgebraElement::random(2, rng), {-0.2, 0.15}, 0.85);
    const auto phi = make_test_function("gaussian", kGrid2, 6);
    const auto F = Fs.sample(kGrid2);
    const auto G = Gs.sample(kGrid2);

    SymbolFunction aF = [&](const Point& x, const Point& xi, std::span<Complex> out) {
        const Point s = kJ.apply(xi);
        Fs.evaluate({x[0] - s[0], x[1] - s[1]}, out);
    };
    SymbolFunction aG = [&](const Point& x, const Point& xi, std::span<Complex> out) {
        const Point s = kJ.apply(xi);
        Gs.evaluate({x[0] + s[0], x[1] + s[1]}, out);
    };
    const double nphi = module_norm(phi);
    const auto lf = left_rep_apply(F, phi, kJ);
    const auto rg = right_rep_apply(G, phi, kJ);
    const double dl = module_norm(lf - quantize_apply(aF, 2, phi));
    const double dr = module_norm(rg - quantize_apply(aG, 2, phi, SymbolSide::right));
    MESSAGE("L path difference " << dl / nphi << ", R path difference " << dr / nphi);
    CHECK(dl <= 1e-5 * nphi);
    CHECK(dr <= 1e-5 * nphi);
}

TEST_CASE("associativity and commutation of the regular representations") {
    Rng rng(9);
    for (double theta : {0.0, 0.5}) {
        const DeformationMatrix J = theta == 0.0 ? DeformationMatrix::zero(2) : DeformationMatrix::standard(theta);
        for (int k : {1, 2}) {
            const auto F = gaussian_field(AlgebraElement::random(k, rng), {0.2, 0.0}, 0.9, {0.4, 0.0}).sample(kGrid2);
            const auto G = gaussian_field(AlgebraElement::random(k, rng), {0.0, -0.2}, 0.85).sample(kGrid2);
            const auto H = gaussian_field(AlgebraElement::random(k, rng), {-0.1, 0.1}, 0.9, {0.0, -0.5}).sample(kGrid2);
            const auto lhs = deformed_product(deformed_product(F, G, J), H, J);
            const auto rhs = deformed_product(F, deformed_product(G, H, J), J);
            const double scale = F.sup_norm() * G.sup_norm() * H.sup_norm();
            CHECK(oracle::max_diff(lhs, rhs) <= 1e-4 * scale);

            const auto phi = make_test_function("modulated-gaussian", kGrid2, 17, k);
            const double c = module_norm(commutator_apply(F, H, phi, J));
            CHECK(c <= 1e-4 * module_norm(phi));
        }
    }
}

TEST_CASE("commutator edge cases") {
    const GridSpec g(1, 10.0, 256);
    const auto F = make_test_function("bounded-field", g, 1, 1);
    const auto G = make_test_function("bounded-field", g, 2, 1);
    const auto phi = make_test_function("gaussian", g, 3, 1);
    CHECK(module_norm(commutator_apply(F, G, phi, DeformationMatrix::zero(1))) <= 1e-8);

    const auto I = TestFunction::constant(2, AlgebraElement::identity(2)).sample(kCoarse2);
    const auto G2 = make_test_function("gaussian", kCoarse2, 4);
    const auto phi2 = make_test_function("gaussian", kCoarse2, 5);
    CHECK(module_norm(commutator_apply(I, G2, phi2, kJ)) <= 1e-8);
}

TEST_CASE("left regular representation is bounded on random inputs") {
    const auto F = make_test_function("bounded-field", kCoarse2, 11);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 6; ++s) {
        const auto phi = make_test_function(s % 2 ? "gaussian" : "modulated-gaussian", kCoarse2, 100 + s);
        worst = std::max(worst, module_norm(left_rep_apply(F, phi, kJ)) / module_norm(phi));
    }
    // regression value: 2.458 observed with the seeds below
    MESSAGE("max ||L_F phi|| / ||phi|| = " << worst);
    CHECK(worst <= 1.1 * 2.458);
}

TEST_CASE("approximate identity") {
    const GridSpec freq(2, 4.0, 128);
    for (int k : {1, 2, 4}) {
        const auto bump = approximate_identity_bump(k, freq, 2);
        Matrix mass = Matrix::Zero(2, 2);
        for (std::size_t i = 0; i < bump.size(); ++i) mass += bump.at(i).matrix();
        mass *= freq.cell_volume() / (2.0 * std::numbers::pi);
        CHECK((mass - Matrix::Identity(2, 2)).norm() <= 1e-10);

        const auto plain = approximate_identity_bump(k, freq, 2, BumpNormalization::lebesgue);
        Matrix m2 = Matrix::Zero(2, 2);
        for (std::size_t i = 0; i < plain.size(); ++i) m2 += plain.at(i).matrix();
        CHECK((m2 * freq.cell_volume() - Matrix::Identity(2, 2)).norm() <= 1e-10);
    }
    CHECK_THROWS_AS(approximate_identity(8, freq, 2), ResolutionError);

    const GridSpec x = freq.dual();
    TestFunction phis(2, 2, DecayClass::schwartz);
    TestFunction::Term t;
    t.width = 2.0;
    t.slope = {0.3, 0.0};
    t.coeff = AlgebraElement::identity(2);
    phis.add(t);
    const auto phi = phis.sample(x);
    const double nphi = module_norm(phi);
    double prev = 1e300;
    for (int k : {1, 2, 4}) {
        const auto ek = approximate_identity(k, freq, 2);
        CHECK(ek.grid() == x);
        const double err = module_norm(deformed_product(ek, phi, kJ) - phi) / nphi;
        MESSAGE("k = " << k << " relative error " << err);
        CHECK(err < prev);
        prev = err;
        // undeformed: pointwise multiplication by e_k
        const auto undeformed = deformed_product(ek, phi, DeformationMatrix::zero(2));
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, cstar_norm(undeformed.at(i) - ek.at(i) * phi.at(i)));
        CHECK(d <= 1e-12);
    }
    CHECK(prev <= 0.1);

    // Lebesgue-normalized bumps converge to (2 pi)^{-1} phi instead
    const auto ek = approximate_identity(4, freq, 2, BumpNormalization::lebesgue);
    const auto centre = ek.at(x.flat_index({64, 64}));
    CHECK(cstar_norm(centre - AlgebraElement::scalar(2, 1.0 / (2.0 * std::numbers::pi))) <= 1e-12);
}

TEST_CASE("deformed product preconditions") {
    const auto F = make_test_function("bounded-field", kGrid2, 1);
    const auto G = make_test_function("bounded-field", kGrid2, 2);
    CHECK_THROWS_AS(deformed_product(F, G, kJ), PreconditionError);
    CHECK_NOTHROW(deformed_product(F, G, DeformationMatrix::zero(2)));
    const auto h = make_test_function("gaussian", GridSpec(2, 6.0, 32), 1);
    CHECK_THROWS_AS(deformed_product(h, make_test_function("gaussian", kGrid2, 1), kJ), ShapeError);
    CHECK_THROWS_AS(deformed_product(make_test_function("gaussian", GridSpec(1, 6.0, 64), 1),
                                     make_test_function("gaussian", GridSpec(1, 6.0, 64), 2), kJ),
                    ShapeError);
}
