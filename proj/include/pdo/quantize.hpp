#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "pdo/report.hpp"
#include "pdo/sampling.hpp"

namespace pdo {

/// Analytic symbol: writes the k x k value a(x, xi) into `out`.
using SymbolFunction = std::function<void(const Point& x, const Point& xi, std::span<Complex> out)>;

/// Whether the symbol multiplies the transformed vector from the left,
/// a(x,xi) phi^(xi), or from the right, phi^(xi) a(x,xi). The two agree for
/// k = 1; right-sided symbols describe operators such as R_G that act by
/// right multiplication in the algebra.
enum class SymbolSide { left, right };

/// The pairs (beta, gamma) <= alpha = (1, ..., 1) of the seminorm pi(a).
class MultiIndexBox {
public:
    struct Pair {
        std::array<int, kMaxDim> beta{};
        std::array<int, kMaxDim> gamma{};
    };

    explicit MultiIndexBox(int n);

    int n() const noexcept { return n_; }
    /// All 4^n pairs; the bit pattern of the position encodes which
    /// derivatives are taken (x axes in the low bits, xi axes above).
    const std::vector<Pair>& pairs() const noexcept { return pairs_; }

private:
    int n_;
    std::vector<Pair> pairs_;
};

/// O(a) phi(x) = (2 pi)^{-n/2} sum_xi e^{i x.xi} a(x,xi) phi^(xi) (pi/L)^n.
///
/// `a` must live on phi.grid() x phi.grid().dual(). phi must be a decaying
/// rapidly decreasing field. The result is tagged schwartz when its samples
/// satisfy the decay invariant and bounded otherwise.
ModuleFunction quantize_apply(const SampledSymbol& a, const ModuleFunction& phi,
                              SymbolSide side = SymbolSide::left);

/// Same operator with the symbol evaluated on the fly; used where a dense
/// symbol would not fit in memory (n = 2 with N = 64 needs 16.7M samples).
ModuleFunction quantize_apply(const SymbolFunction& a, int k, const ModuleFunction& phi,
                              SymbolSide side = SymbolSide::left);

/// Reference evaluation of the same sum: fourier_direct for phi^ and one
/// complex exponential per (x, xi) term. Slow; cross-validation only.
ModuleFunction quantize_apply_direct(const SampledSymbol& a, const ModuleFunction& phi,
                                     SymbolSide side = SymbolSide::left);

/// The Hilbert-space adjoint of the discretized O(a) (left-sided), applied to
/// psi: <O(a) phi, psi> = <phi, O(a)^* psi> exactly on the grid. No decay
/// check is made.
ModuleFunction quantize_adjoint_apply(const SampledSymbol& a, const ModuleFunction& psi);

/// pi(a) = max over (beta, gamma) <= alpha of sup ||d_x^beta d_xi^gamma a||,
/// with centered differences (second-order one-sided at the box edges).
/// Throws ResolutionError when an axis has fewer than 8 points.
double pi_seminorm(const SampledSymbol& a);

struct NormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Running estimate after each iteration (nondecreasing).
    std::vector<double> history;
};

/// Largest singular value of the discretized O(a) by power iteration on
/// O(a)^* O(a), started from seeded white noise. The Rayleigh quotient of a
/// positive operator is nondecreasing along power iteration; the reported
/// value is its running maximum. Stops early once the relative change per
/// iteration stays below `tolerance` for 10 iterations.
NormEstimate operator_norm_estimate(const SampledSymbol& a, int iterations, std::uint64_t seed,
                                    double tolerance = 1e-13);

/// 1.5 * 2^n * pi^n.
double default_l_config(int n);

/// For trial_count seeded test functions phi computes
/// ||O(a) phi||_2 / (pi(a) ||phi||_2) and passes iff every ratio is at most
/// l_config. Throws InvalidInput when pi(a) = 0.
VerificationReport cv_bound_check(const SampledSymbol& a, int trial_count, std::uint64_t seed, double l_config);

/// g(x, xi) = fourier(h_x phi)(xi), h_x(y) = prod_j (i - (y_j - x_j))^{-1},
/// for x on `x_grid` and xi on phi.grid().dual(). The window decays only like
/// 1/|x|, so x_grid is separate from (and usually much larger than)
/// phi.grid().
SampledSymbol windowed_transform(const ModuleFunction& phi, const GridSpec& x_grid);

/// The phase-space Gram element sum g* g h_x^n (pi/L)^n of windowed_transform,
/// accumulated one x at a time without storing g.
AlgebraElement windowed_gram(const ModuleFunction& phi, const GridSpec& x_grid);

/// Gaussian damping levels for the adjoint-symbol integral and the
/// convergence tolerance on successive extrapolated estimates.
struct RegularizationSchedule {
    std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
    /// Limit on the sup difference of the last two extrapolated estimates,
    /// relative to max(1, sup ||a||).
    double tolerance = 1e-4;
    /// Each axis is padded to pad_factor * N before the periodic convolution.
    int pad_factor = 2;
};

struct AdjointSymbolResult {
    SampledSymbol p;
    /// Sup differences between successive extrapolated estimates.
    std::vector<double> trace;
};

/// p(y,xi) = int int e^{-i z.eta} a(y - z, xi - eta)^* dz deta (2 pi)^{-n},
/// regularized by e^{-eps(|z|^2 + |eta|^2)} at each scheduled eps and
/// extrapolated to eps = 0 with a Neville table in eps. Each regularized
/// integral is a convolution, evaluated as a multiplier in the discrete
/// Fourier domain of the padded symbol (zero padding for decaying symbols,
/// edge continuation for bounded ones). Throws ConvergenceError carrying the
/// trace when the last two estimates differ by more than the tolerance.
AdjointSymbolResult adjoint_symbol(const SampledSymbol& a, const RegularizationSchedule& schedule = {});

/// One regularized level of adjoint_symbol (eps >= 0; eps = 0 applies the
/// undamped multiplier).
SampledSymbol regularized_adjoint_symbol(const SampledSymbol& a, double eps, int pad_factor = 2);

/// a_eps(x, xi) = cutoff_profile(eps |(x, xi)|) a(x, xi). Requires 0 < eps <= 1.
SampledSymbol cutoff_family(const SampledSymbol& a, double eps);

/// b = prod_j (1 + d_{x_j})^2 (1 + d_{xi_j})^2 a with centered first and
/// second differences (second-order one-sided at the edges).
SampledSymbol operb_transform(const SampledSymbol& a);

struct OperbReconstruction {
    SampledSymbol a;
    /// The kernel reaches past the box while b is not negligible at its
    /// edge, so the off-box continuation influenced the result.
    bool kernel_truncated = false;
};

/// a(x, xi) = int gamma(-z) gamma(-zeta) b(x + z, xi + zeta) dz dzeta with
/// gamma(x) = prod_j f(x_j), f(t) = t e^{-t} (t >= 0), applied one axis at a
/// time as a one-sided discrete convolution over t <= kOperbKernelCutoff.
OperbReconstruction operb_reconstruct(const SampledSymbol& b);

/// Point past which t e^{-t} < 1e-12.
inline constexpr double kOperbKernelCutoff = 31.4;

}  // namespace pdo
