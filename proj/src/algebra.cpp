#include "pdo/algebra.hpp"

#include <cmath>

#include "pdo/error.hpp"

namespace pdo {

AlgebraElement::AlgebraElement(int dim) {
    if (dim <= 0) throw InvalidInput("algebra dimension must be positive");
    m_ = Matrix::Zero(dim, dim);
}

AlgebraElement::AlgebraElement(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw ShapeError("algebra element must be a non-empty square matrix");
}

AlgebraElement AlgebraElement::identity(int dim) {
    AlgebraElement e(dim);
    e.m_.setIdentity();
    return e;
}

AlgebraElement AlgebraElement::scalar(int dim, Complex c) {
    AlgebraElement e = identity(dim);
    e.m_ *= c;
    return e;
}

AlgebraElement AlgebraElement::random(int dim, Rng& rng) {
    AlgebraElement e(dim);
    // column-major fill keeps the draw order independent of Eigen internals
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r) e.m_(r, c) = rng.complex_normal();
    return e;
}

AlgebraElement AlgebraElement::from_block(std::span<const Complex> block, int dim) {
    if (block.size() != static_cast<std::size_t>(dim) * dim)
        throw ShapeError("block size does not match algebra dimension");
    AlgebraElement e(dim);
    std::copy(block.begin(), block.end(), e.m_.data());
    return e;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
    if (o.dim() != dim()) throw ShapeError("algebra dimension mismatch");
    m_ += o.m_;
    return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
    if (o.dim() != dim()) throw ShapeError("algebra dimension mismatch");
    m_ -= o.m_;
    return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex c) {
    m_ *= c;
    return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.dim() != b.dim()) throw ShapeError("algebra dimension mismatch");
    return AlgebraElement(Matrix(a.matrix() * b.matrix()));
}

double cstar_norm(std::span<const Complex> block, int dim) {
    for (const Complex& z : block)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InvalidInput("non-finite algebra element");
    if (dim == 1) return std::abs(block[0]);
    if (dim == 2) {
        // closed-form SVD: largest eigenvalue of the Hermitian 2x2 matrix a* a
        const Complex a = block[0], c = block[1], b = block[2], d = block[3];
        const double m00 = std::norm(a) + std::norm(c);
        const double m11 = std::norm(b) + std::norm(d);
        const Complex m01 = std::conj(a) * b + std::conj(c) * d;
        const double half_gap = 0.5 * (m00 - m11);
        const double lmax = 0.5 * (m00 + m11) + std::sqrt(half_gap * half_gap + std::norm(m01));
        return std::sqrt(std::max(lmax, 0.0));
    }
    Eigen::Map<const Matrix> m(block.data(), dim, dim);
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double cstar_norm(const AlgebraElement& a) { return cstar_norm(a.block(), a.dim()); }

AlgebraElement approximate_unit(int k_index, int dim) {
    if (k_index <= 0) throw InvalidInput("approximate unit index must be positive");
    return AlgebraElement::identity(dim);
}

}  // namespace pdo
