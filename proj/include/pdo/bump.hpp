#pragma once

#include <cmath>

namespace pdo {

/// Radial cutoff profile: 1 on [0, 1], exp(1 - 1/(1 - (r-1)^2)) on (1, 2),
/// 0 from 2 on. Shared by the symbol cutoff family, the approximate identity
/// and the bump test functions.
inline double cutoff_profile(double r) noexcept {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double s = r - 1.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace pdo
