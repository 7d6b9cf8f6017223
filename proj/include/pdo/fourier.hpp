#pragma once

#include "pdo/sampling.hpp"

namespace pdo {

/// phi^(xi) = (2 pi)^{-n/2} sum_x e^{-i xi.x} phi(x) h^n on the dual grid.
///
/// With x_j = -L + j h and xi_m = -pi/h + m pi/L the kernel factors as
/// s (-1)^{j+m} e^{-2 pi i m j / N} with s = (-1)^{nN/2}, so the box offset is
/// handled by exact sign flips around an FFT. Throws PreconditionError for
/// bounded-class input.
ModuleFunction fourier(const ModuleFunction& f);

/// Inverse of fourier: maps samples on a grid back to its dual. Same
/// precondition.
ModuleFunction inverse_fourier(const ModuleFunction& f);

/// Transforms without the decay check. The caller vouches that the samples
/// represent the function (used for compactly supported frequency bumps whose
/// inverse transform is a bounded field). The result carries `result_decay`.
ModuleFunction fourier_unchecked(const ModuleFunction& f, DecayClass result_decay);
ModuleFunction inverse_fourier_unchecked(const ModuleFunction& f, DecayClass result_decay);

/// The forward transform as a direct O(N^{2n}) sum with one complex
/// exponential per term; no FFT. Slow, used for cross-validation runs.
ModuleFunction fourier_direct(const ModuleFunction& f);

}  // namespace pdo
