#include "doctest.h"

#include <cmath>
#include <limits>

#include "pdo/algebra.hpp"
#include "pdo/error.hpp"
#include "pdo/rng.hpp"

using namespace pdo;

namespace {

// Largest singular value by power iteration on M* M, independent of the
// closed-form and SVD paths in the library.
double power_sigma(const Matrix& m) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(m.cols());
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXcd w = m.adjoint() * (m * v);
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("cstar_norm examples") {
    CHECK(cstar_norm(AlgebraElement::identity(2)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cstar_norm(AlgebraElement::zero(2)) == 0.0);

    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 2.0;
    const AlgebraElement a(m);
    CHECK(cstar_norm(a) == doctest::Approx(power_sigma(m)).epsilon(1e-12));
    CHECK(cstar_norm(a) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("cstar_norm rejects non-finite entries") {
    Matrix m = Matrix::Identity(2, 2);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cstar_norm(AlgebraElement(m)), InvalidInput);
    m(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(cstar_norm(AlgebraElement(m)), InvalidInput);
}

TEST_CASE("cstar_norm agrees with power iteration for every supported dimension") {
    Rng rng(11);
    for (int k = 1; k <= 5; ++k)
        for (int trial = 0; trial < 10; ++trial) {
            const AlgebraElement a = AlgebraElement::random(k, rng);
            CHECK(cstar_norm(a) == doctest::Approx(power_sigma(a.matrix())).epsilon(1e-9));
        }
}

TEST_CASE("C*-algebra norm properties on random elements") {
    Rng rng(2024);
    for (int k : {1, 2, 3, 4}) {
        for (int trial = 0; trial < 50; ++trial) {
            const AlgebraElement a = AlgebraElement::random(k, rng);
            const AlgebraElement b = AlgebraElement::random(k, rng);
            const double na = cstar_norm(a);
            const double nb = cstar_norm(b);
            CHECK(cstar_norm(a * b) <= na * nb * (1.0 + 1e-12));
            CHECK(std::abs(cstar_norm(a.adjoint()) - na) <= 1e-12 * na);
            CHECK(std::abs(cstar_norm(a.adjoint() * a) - na * na) <= 1e-10 * na * na);
        }
    }
}

TEST_CASE("involution is an involution") {
    Rng rng(3);
    const AlgebraElement a = AlgebraElement::random(3, rng);
    CHECK((a.adjoint().adjoint().matrix() - a.matrix()).norm() == 0.0);
}

TEST_CASE("approximate unit of the unital algebra is the identity") {
    CHECK(approximate_unit(1, 2).matrix() == Matrix::Identity(2, 2));
    CHECK(approximate_unit(10, 2).matrix() == Matrix::Identity(2, 2));
    Rng rng(5);
    const AlgebraElement a = AlgebraElement::random(2, rng);
    CHECK(cstar_norm(approximate_unit(3, 2) * a - a) == 0.0);
    CHECK_THROWS_AS(approximate_unit(0, 2), InvalidInput);
}

TEST_CASE("shape checks") {
    CHECK_THROWS_AS(AlgebraElement(0), InvalidInput);
    CHECK_THROWS_AS(AlgebraElement(Matrix(Matrix::Zero(2, 3))), ShapeError);
    CHECK_THROWS_AS(AlgebraElement::identity(2) + AlgebraElement::identity(3), ShapeError);
}

TEST_CASE("random elements are deterministic in the seed") {
    Rng r1(42), r2(42);
    CHECK(AlgebraElement::random(2, r1).matrix() == AlgebraElement::random(2, r2).matrix());
}
