#pragma once

// Small dense kernels on raw column-major k x k blocks. These sit in the inner
// loops of every grid operation, so they avoid Eigen temporaries.

#include <complex>
#include <cstddef>

namespace pdo::detail {

using Complex = std::complex<double>;

/// C += s * A * B
inline void mul_add(Complex* C, const Complex* A, const Complex* B, int k, Complex s = 1.0) noexcept {
    if (k == 1) {
        C[0] += s * A[0] * B[0];
        return;
    }
    for (int c = 0; c < k; ++c)
        for (int m = 0; m < k; ++m) {
            const Complex b = s * B[m + c * k];
            for (int r = 0; r < k; ++r) C[r + c * k] += A[r + m * k] * b;
        }
}

/// C += A^* * B
inline void adj_mul_add(Complex* C, const Complex* A, const Complex* B, int k) noexcept {
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < k; ++r) {
            Complex acc = 0.0;
            for (int m = 0; m < k; ++m) acc += std::conj(A[m + r * k]) * B[m + c * k];
            C[r + c * k] += acc;
        }
}

/// C += s * A
inline void axpy(Complex* C, const Complex* A, std::size_t len, Complex s) noexcept {
    for (std::size_t i = 0; i < len; ++i) C[i] += s * A[i];
}

/// B = A^*
inline void adjoint(Complex* B, const Complex* A, int k) noexcept {
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < k; ++r) B[r + c * k] = std::conj(A[c + r * k]);
}

}  // namespace pdo::detail
