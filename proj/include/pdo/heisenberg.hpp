#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pdo/deformation.hpp"
#include "pdo/quantize.hpp"
#include "pdo/report.hpp"

namespace pdo {

enum class OperatorKind { from_symbol, left_rep, right_rep, composite };

/// An immutable, cheaply copyable module operator held as a closure.
/// Left-sided symbols and left representations are right A-linear,
/// T(phi a) = T(phi) a; right representations and right-sided symbols are
/// left A-linear instead.
class OperatorHandle {
public:
    using Action = std::function<ModuleFunction(const ModuleFunction&)>;

    OperatorHandle(OperatorKind kind, Action action);

    /// O(a). The sampled symbol is kept and exposed through symbol().
    static OperatorHandle from_symbol(SampledSymbol a, SymbolSide side = SymbolSide::left);
    /// O(a) with the symbol evaluated on the fly.
    static OperatorHandle from_symbol(SymbolFunction a, int k, SymbolSide side = SymbolSide::left);
    static OperatorHandle left_rep(ModuleFunction F, DeformationMatrix J);
    static OperatorHandle right_rep(ModuleFunction G, DeformationMatrix J);
    static OperatorHandle composite(Action action);

    OperatorKind kind() const noexcept { return kind_; }
    /// The sampled symbol of a from_symbol handle, null otherwise.
    const SampledSymbol* symbol() const noexcept { return symbol_.get(); }

    ModuleFunction apply(const ModuleFunction& phi) const { return (*action_)(phi); }
    ModuleFunction operator()(const ModuleFunction& phi) const { return apply(phi); }

private:
    OperatorKind kind_;
    std::shared_ptr<const Action> action_;
    std::shared_ptr<const SampledSymbol> symbol_;
};

/// outer o inner.
OperatorHandle compose(const OperatorHandle& outer, const OperatorHandle& inner);
/// A B - B A.
OperatorHandle commutator(const OperatorHandle& A, const OperatorHandle& B);

enum class TranslationMode {
    /// z must be a multiple of the grid spacing on every axis (within 1e-9
    /// of a spacing); the shift is an index move. Samples entering the box
    /// are zero for rapidly decreasing fields and copied from the nearest
    /// edge sample for bounded ones.
    grid,
    /// Bandlimited shift e^{-i xi.z} in the transform domain; any z, but the
    /// field must be rapidly decreasing.
    interpolate,
};

/// E_{z,zeta,t} f(x) = e^{it} e^{i zeta.x} f(x - z). Throws
/// PreconditionError for an off-grid z in grid mode or for a bounded field
/// in interpolate mode.
ModuleFunction heisenberg_translate(const ModuleFunction& f, const Point& z, const Point& zeta, double t,
                                    TranslationMode mode = TranslationMode::grid);

/// E_{z,zeta,t}^{-1} g(x) = e^{-it} e^{-i zeta.(x + z)} g(x + z).
ModuleFunction heisenberg_translate_inverse(const ModuleFunction& g, const Point& z, const Point& zeta, double t,
                                            TranslationMode mode = TranslationMode::grid);

/// T_{z,zeta} = E^{-1} T E as a composite handle. The scalar e^{it} cancels;
/// t is accepted so that the cancellation can be checked numerically.
OperatorHandle conjugate_operator(const OperatorHandle& T, const Point& z, const Point& zeta, double t = 0.0,
                                  TranslationMode mode = TranslationMode::grid);

/// (z, zeta) -> T_{z,zeta}, or any other operator family.
using OperatorFamily = std::function<OperatorHandle(const Point& z, const Point& zeta)>;

/// Derivative orders in z (beta) and zeta (gamma); each entry 0 or 1.
struct SmoothnessOrder {
    std::array<int, kMaxDim> beta{};
    std::array<int, kMaxDim> gamma{};
};

/// Centered finite difference of (z, zeta) -> family(z, zeta) phi at the
/// origin: one symmetric difference of width 2 step per active coordinate.
/// Throws InvalidInput for orders outside {0, 1} and ResolutionError when
/// step is smaller than the grid spacing.
ModuleFunction smoothness_probe(const OperatorFamily& family, const ModuleFunction& phi, const SmoothnessOrder& order,
                                double step);

struct PhaseSpaceShift {
    Point z{};
    Point zeta{};
};

/// Compares T_{z,zeta} phi with T_{z - J zeta, 0} phi for every sample and
/// phi (both via interpolating translations). Metric
/// "max_relative_deviation" = max ||difference||_2 / ||T_{z - J zeta,0} phi||_2,
/// passing at or below `tolerance`; series "deviation" by sample index.
VerificationReport heissmooth_check(const OperatorHandle& T, const DeformationMatrix& J,
                                    const std::vector<PhaseSpaceShift>& samples,
                                    const std::vector<ModuleFunction>& phis, double tolerance = 1e-4);

/// F(z) = a(z, 0), read at the zero frequency of the symbol grid.
ModuleFunction extract_field(const SampledSymbol& a);

/// sup over the symbol grid of ||a(x, xi) - F(x - J xi)|| with F = extract_field(a).
/// When every J xi is a grid multiple the shift is an index move (zero or
/// edge continuation by decay class); otherwise F is shifted spectrally.
double symbol_translation_deviation(const SampledSymbol& a, const DeformationMatrix& J);

struct CommutantOptions {
    double commutation_tolerance = 1e-4;
    double symbol_tolerance = 1e-6;
    double extraction_tolerance = 1e-3;
    /// When false the operator is a designated counterexample: the
    /// commutator metric must reach `separation` instead.
    bool expect_commuting = true;
    double separation = 1e-2;
};

/// Two-sided commutant test for T = from_symbol(a) with a sampled.
/// Metrics:
///  - "commutator": max ||[T, R_G] phi||_2 / ||phi||_2 over the suites;
///  - "symbol_deviation": symbol_translation_deviation(a, J);
///  - "extraction": max ||T phi - L_F phi||_2 / ||phi||_2 with
///    F = extract_field(a) (only when commuting is expected);
///  - "implication": 1 when small commutator and small symbol deviation
///    occur together or not at all, 0 otherwise.
/// Throws PreconditionError when T carries no sampled symbol.
VerificationReport commutant_check(const OperatorHandle& T, const DeformationMatrix& J,
                                   const std::vector<ModuleFunction>& G_suite,
                                   const std::vector<ModuleFunction>& phi_suite, const CommutantOptions& options = {});

}  // namespace pdo
