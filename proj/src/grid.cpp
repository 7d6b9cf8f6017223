#include "pdo/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pdo/error.hpp"

namespace pdo {

namespace {
bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

GridSpec::GridSpec(int n, double half_width, int points_per_axis)
    : n_(n), half_width_(half_width), N_(points_per_axis) {
    if (n < 1 || n > kMaxDim)
        throw InvalidInput("grid dimension must be 1 or 2, got " + std::to_string(n));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw InvalidInput("grid half-width must be positive and finite");
    if (!is_power_of_two(points_per_axis) || points_per_axis < 2)
        throw InvalidInput("points per axis must be a power of two >= 2, got " +
                           std::to_string(points_per_axis));
}

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), n_); }

std::size_t GridSpec::size() const noexcept {
    std::size_t s = 1;
    for (int a = 0; a < n_; ++a) s *= static_cast<std::size_t>(N_);
    return s;
}

std::vector<double> GridSpec::axis() const {
    std::vector<double> x(static_cast<std::size_t>(N_));
    for (int i = 0; i < N_; ++i) x[static_cast<std::size_t>(i)] = coordinate(i);
    return x;
}

std::array<int, kMaxDim> GridSpec::multi_index(std::size_t flat) const noexcept {
    std::array<int, kMaxDim> idx{};
    for (int a = n_ - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(N_));
        flat /= static_cast<std::size_t>(N_);
    }
    return idx;
}

std::size_t GridSpec::flat_index(const std::array<int, kMaxDim>& idx) const noexcept {
    std::size_t flat = 0;
    for (int a = 0; a < n_; ++a)
        flat = flat * static_cast<std::size_t>(N_) + static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
    return flat;
}

Point GridSpec::point(std::size_t flat) const noexcept {
    const auto idx = multi_index(flat);
    Point p{};
    for (int a = 0; a < n_; ++a) p[static_cast<std::size_t>(a)] = coordinate(idx[static_cast<std::size_t>(a)]);
    return p;
}

GridSpec GridSpec::dual() const { return GridSpec(n_, std::numbers::pi / spacing(), N_); }

bool GridSpec::matches(const GridSpec& other) const noexcept {
    return n_ == other.n_ && N_ == other.N_ &&
           std::abs(half_width_ - other.half_width_) <= 1e-12 * std::max(half_width_, other.half_width_);
}

}  // namespace pdo
