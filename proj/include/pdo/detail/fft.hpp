#pragma once

#include <complex>
#include <span>

namespace pdo::detail {

/// Unnormalized in-place multidimensional DFT of `howmany` interleaved
/// sequences: element c of sample j lives at data[j * howmany + c], samples in
/// row-major order over `dims`. sign = -1 computes sum_j e^{-2 pi i m.j/N} x_j,
/// sign = +1 the conjugate kernel. Plans are cached per shape.
void fft_many(std::complex<double>* data, std::span<const int> dims, int howmany, int sign);

}  // namespace pdo::detail
