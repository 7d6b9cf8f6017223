#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "pdo/rng.hpp"

namespace pdo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// An element of the matrix algebra M_k(C) with the operator-norm C*-structure.
/// Entries are stored column-major, as in Eigen.
class AlgebraElement {
public:
    AlgebraElement() = default;
    explicit AlgebraElement(int dim);
    explicit AlgebraElement(Matrix m);

    static AlgebraElement zero(int dim) { return AlgebraElement(dim); }
    static AlgebraElement identity(int dim);
    static AlgebraElement scalar(int dim, Complex c);
    /// Entries drawn i.i.d. from the standard complex normal distribution.
    static AlgebraElement random(int dim, Rng& rng);
    /// Wraps a raw column-major k x k block.
    static AlgebraElement from_block(std::span<const Complex> block, int dim);

    int dim() const noexcept { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const noexcept { return m_; }
    Complex operator()(int row, int col) const { return m_(row, col); }
    Complex& operator()(int row, int col) { return m_(row, col); }
    std::span<const Complex> block() const noexcept {
        return {m_.data(), static_cast<std::size_t>(m_.size())};
    }

    /// Involution: conjugate transpose.
    AlgebraElement adjoint() const { return AlgebraElement(Matrix(m_.adjoint())); }

    AlgebraElement& operator+=(const AlgebraElement& o);
    AlgebraElement& operator-=(const AlgebraElement& o);
    AlgebraElement& operator*=(Complex c);

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(AlgebraElement a, Complex c) { return a *= c; }
    friend AlgebraElement operator*(Complex c, AlgebraElement a) { return a *= c; }
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

    bool all_finite() const noexcept { return m_.allFinite(); }

private:
    Matrix m_;
};

/// Largest singular value. Throws InvalidInput on non-finite entries.
double cstar_norm(const AlgebraElement& a);

/// Largest singular value of a raw column-major k x k block.
double cstar_norm(std::span<const Complex> block, int dim);

/// The k-th member of an approximate unit of M_dim(C). The algebra is unital,
/// so every member is the identity.
AlgebraElement approximate_unit(int k_index, int dim);

}  // namespace pdo
