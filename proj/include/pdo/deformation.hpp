#pragma once

#include <array>
#include <vector>

#include "pdo/sampling.hpp"
#include "pdo/test_functions.hpp"

namespace pdo {

/// A real skew-symmetric n x n matrix J (n <= 2; for n = 1 only J = 0).
class DeformationMatrix {
public:
    /// Row-major entries; only the leading n x n block is read. Throws
    /// InvalidInput unless J^T = -J exactly.
    DeformationMatrix(int n, const std::array<double, 4>& entries);

    static DeformationMatrix zero(int n);
    /// [[0, theta], [-theta, 0]] (n = 2).
    static DeformationMatrix standard(double theta);

    int n() const noexcept { return n_; }
    double operator()(int row, int col) const noexcept { return j_[static_cast<std::size_t>(row * 2 + col)]; }
    bool is_zero() const noexcept;

    /// J u.
    Point apply(const Point& u) const noexcept;
    /// J^T u = -J u.
    Point apply_transpose(const Point& u) const noexcept;

private:
    int n_;
    std::array<double, 4> j_{};
};

/// F x_J G (x) = (2 pi)^{-n} int int e^{i u.v} F(x + J u) G(x + v) du dv.
///
/// Evaluation depends on the decay classes:
///  - J = 0: the pointwise product F(x) G(x) (any classes).
///  - F and G rapidly decreasing: the twisted convolution
///    H(w) = (2 pi)^{-n/2} sum_{eta + u = w} e^{-i eta.J u} F^(eta) G^(u) dxi^n
///    followed by inverse_fourier; off-grid values are spectral.
///  - F bounded, G decreasing: (2 pi)^{-n/2} sum_u F(x - J u) e^{i u.x} G^(u) dxi^n.
///  - F decreasing, G bounded: (2 pi)^{-n/2} sum_xi e^{i x.xi} F^(xi) G(x + J xi) dxi^n.
///  In the last two the bounded field is read off-grid by multilinear
///  interpolation with constant continuation past the box; the sum is
///  grouped by integer grid offset so each group is one inverse FFT.
/// Both bounded with J != 0 throws PreconditionError; shape mismatches throw
/// ShapeError. The result is tagged schwartz when both inputs are.
ModuleFunction deformed_product(const ModuleFunction& F, const ModuleFunction& G, const DeformationMatrix& J);

/// L_F phi = F x_J phi.
ModuleFunction left_rep_apply(const ModuleFunction& F, const ModuleFunction& phi, const DeformationMatrix& J);

/// R_G phi = phi x_J G.
ModuleFunction right_rep_apply(const ModuleFunction& G, const ModuleFunction& phi, const DeformationMatrix& J);

/// L_F(R_G phi) - R_G(L_F phi).
ModuleFunction commutator_apply(const ModuleFunction& F, const ModuleFunction& G, const ModuleFunction& phi,
                                const DeformationMatrix& J);

/// How the bump of the approximate identity is normalized.
enum class BumpNormalization {
    /// sum beta h^n = (2 pi)^{n/2}, i.e. unit mass for the measure
    /// (2 pi)^{-n/2} dx of the transform; then e_k x_J phi -> phi.
    transform_measure,
    /// sum beta h^n = 1 (Lebesgue mass); then e_k -> (2 pi)^{-n/2}.
    lebesgue,
};

/// e_k = inverse transform of beta_k (x) u_k, where beta_k(xi) =
/// cutoff_profile(2 k |xi|) is supported in |xi| <= 1/k. `freq_grid` carries
/// the bump; e_k lives on freq_grid.dual() and is tagged bounded. Throws
/// ResolutionError when 1/k < 4 h.
ModuleFunction approximate_identity(int k_index, const GridSpec& freq_grid, int algebra_dim,
                                    BumpNormalization norm = BumpNormalization::transform_measure);

/// The bump itself (sampled on freq_grid, normalized as requested).
ModuleFunction approximate_identity_bump(int k_index, const GridSpec& freq_grid, int algebra_dim,
                                         BumpNormalization norm = BumpNormalization::transform_measure);

struct BruteForceOptions {
    double u_step = 0.35;
    double u_max = 18.0;
    double v_step = 0.22;
    double v_max = 9.0;
    /// Damping levels e^{-eps(|u|^2 + |v|^2)}; the values are combined by
    /// Richardson extrapolation assuming an expansion in powers of eps with
    /// each level half the previous one.
    std::vector<double> epsilons{1e-3, 5e-4, 2.5e-4};
};

/// Slow oracle: the defining double integral evaluated by direct tensor
/// quadrature at x with Gaussian damping, extrapolated to zero damping.
/// Fields are evaluated analytically.
AlgebraElement deformed_product_bruteforce(const TestFunction& F, const TestFunction& G, const DeformationMatrix& J,
                                           const Point& x, const BruteForceOptions& options = {});

}  // namespace pdo
