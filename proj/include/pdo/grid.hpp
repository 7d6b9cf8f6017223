#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace pdo {

inline constexpr int kMaxDim = 2;

/// A point of R^n, n <= 2. Unused trailing components are zero.
using Point = std::array<double, kMaxDim>;

/// Truncated uniform grid on the box [-L, L)^n with N points per axis.
///
/// Flat indices are row-major with axis 0 slowest. The dual grid has the same
/// N, half-width pi/h and spacing pi/L, so sampled functions and their
/// discrete Fourier transforms pair exactly.
class GridSpec {
public:
    GridSpec(int n, double half_width, int points_per_axis);

    int n() const noexcept { return n_; }
    double half_width() const noexcept { return half_width_; }
    int points_per_axis() const noexcept { return N_; }
    double spacing() const noexcept { return 2.0 * half_width_ / N_; }
    double cell_volume() const noexcept;
    std::size_t size() const noexcept;

    double coordinate(int i) const noexcept { return -half_width_ + i * spacing(); }
    std::vector<double> axis() const;

    Point point(std::size_t flat) const noexcept;
    std::array<int, kMaxDim> multi_index(std::size_t flat) const noexcept;
    std::size_t flat_index(const std::array<int, kMaxDim>& idx) const noexcept;

    GridSpec dual() const;

    /// Index of the sample at coordinate 0 along each axis (N/2).
    int origin_index() const noexcept { return N_ / 2; }

    /// Same n and N, half-widths equal to relative tolerance 1e-12.
    bool matches(const GridSpec& other) const noexcept;

    friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept { return a.matches(b); }

private:
    int n_;
    double half_width_;
    int N_;
};

}  // namespace pdo
