#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pdo/algebra.hpp"
#include "pdo/grid.hpp"

namespace pdo {

/// Rapidly decreasing samples (vectors of the Hilbert module) versus smooth
/// bounded fields. Operations that need decay check it on entry.
enum class DecayClass { schwartz, bounded };

const char* to_string(DecayClass d) noexcept;
DecayClass decay_class_from_string(const std::string& s);

/// Samples of an M_k-valued function on a GridSpec. Each sample is a k x k
/// column-major block; blocks are stored contiguously in flat grid order.
class ModuleFunction {
public:
    ModuleFunction(GridSpec grid, int k, DecayClass decay);
    ModuleFunction(GridSpec grid, int k, DecayClass decay, std::vector<Complex> values);

    /// Samples `f` at every grid point. `f` writes the k x k block for a point.
    static ModuleFunction sample(const GridSpec& grid, int k, DecayClass decay,
                                 const std::function<void(const Point&, std::span<Complex>)>& f);

    const GridSpec& grid() const noexcept { return grid_; }
    int k() const noexcept { return k_; }
    std::size_t block_size() const noexcept { return static_cast<std::size_t>(k_) * k_; }
    DecayClass decay_class() const noexcept { return decay_; }
    std::size_t size() const noexcept { return grid_.size(); }

    std::span<const Complex> block(std::size_t i) const noexcept {
        return {values_.data() + i * block_size(), block_size()};
    }
    std::span<Complex> block(std::size_t i) noexcept {
        return {values_.data() + i * block_size(), block_size()};
    }
    AlgebraElement at(std::size_t i) const { return AlgebraElement::from_block(block(i), k_); }

    const std::vector<Complex>& values() const noexcept { return values_; }
    std::vector<Complex>& values() noexcept { return values_; }

    ModuleFunction with_decay(DecayClass d) const;

    ModuleFunction& operator+=(const ModuleFunction& o);
    ModuleFunction& operator-=(const ModuleFunction& o);
    ModuleFunction& operator*=(Complex c);
    friend ModuleFunction operator+(ModuleFunction a, const ModuleFunction& b) { return a += b; }
    friend ModuleFunction operator-(ModuleFunction a, const ModuleFunction& b) { return a -= b; }
    friend ModuleFunction operator*(ModuleFunction a, Complex c) { return a *= c; }
    friend ModuleFunction operator*(Complex c, ModuleFunction a) { return a *= c; }

    /// Pointwise f(x) a (right A-module action).
    ModuleFunction right_multiply(const AlgebraElement& a) const;
    /// Pointwise a f(x).
    ModuleFunction left_multiply(const AlgebraElement& a) const;

    /// max_x ||f(x)||.
    double sup_norm() const;

    /// Largest sample norm over the outer 10% shell of the box (points with
    /// some |x_j| >= 0.9 L).
    double shell_sup_norm() const;

    /// Boundary samples negligible: shell_sup_norm() <= rel * sup_norm().
    bool satisfies_decay(double rel = 1e-6) const;

    /// Throws PreconditionError unless tagged schwartz and decaying.
    void require_schwartz(const char* operation) const;

private:
    GridSpec grid_;
    int k_;
    DecayClass decay_;
    std::vector<Complex> values_;
};

/// Samples of a phase-space function a(x, xi) on grid_x x grid_xi. The flat
/// sample index is ix * grid_xi.size() + ixi.
class SampledSymbol {
public:
    SampledSymbol(GridSpec grid_x, GridSpec grid_xi, int k, DecayClass decay);

    static SampledSymbol sample(
        const GridSpec& grid_x, const GridSpec& grid_xi, int k, DecayClass decay,
        const std::function<void(const Point&, const Point&, std::span<Complex>)>& f);

    const GridSpec& grid_x() const noexcept { return grid_x_; }
    const GridSpec& grid_xi() const noexcept { return grid_xi_; }
    int k() const noexcept { return k_; }
    std::size_t block_size() const noexcept { return static_cast<std::size_t>(k_) * k_; }
    DecayClass decay_class() const noexcept { return decay_; }
    std::size_t size() const noexcept { return grid_x_.size() * grid_xi_.size(); }

    std::size_t flat(std::size_t ix, std::size_t ixi) const noexcept { return ix * grid_xi_.size() + ixi; }
    std::span<const Complex> block(std::size_t ix, std::size_t ixi) const noexcept {
        return {values_.data() + flat(ix, ixi) * block_size(), block_size()};
    }
    std::span<Complex> block(std::size_t ix, std::size_t ixi) noexcept {
        return {values_.data() + flat(ix, ixi) * block_size(), block_size()};
    }
    AlgebraElement at(std::size_t ix, std::size_t ixi) const {
        return AlgebraElement::from_block(block(ix, ixi), k_);
    }

    const std::vector<Complex>& values() const noexcept { return values_; }
    std::vector<Complex>& values() noexcept { return values_; }

    SampledSymbol& operator+=(const SampledSymbol& o);
    SampledSymbol& operator-=(const SampledSymbol& o);
    SampledSymbol& operator*=(Complex c);
    friend SampledSymbol operator+(SampledSymbol a, const SampledSymbol& b) { return a += b; }
    friend SampledSymbol operator-(SampledSymbol a, const SampledSymbol& b) { return a -= b; }
    friend SampledSymbol operator*(Complex c, SampledSymbol a) { return a *= c; }

    double sup_norm() const;

private:
    void check_compatible(const SampledSymbol& o) const;

    GridSpec grid_x_;
    GridSpec grid_xi_;
    int k_;
    DecayClass decay_;
    std::vector<Complex> values_;
};

/// <f, g> = sum_x f(x)* g(x) h^n, reduced pairwise over a balanced binary
/// tree of grid points.
AlgebraElement module_inner(const ModuleFunction& f, const ModuleFunction& g);

/// ||f||_2 = ||<f, f>||^{1/2}.
double module_norm(const ModuleFunction& f);

/// (sum_x ||f(x)||^2 h^n)^{1/2}; dominates module_norm.
double l2_norm(const ModuleFunction& f);

/// Phase-space inner product sum a(x,xi)* b(x,xi) h_x^n h_xi^n.
AlgebraElement phase_space_inner(const SampledSymbol& a, const SampledSymbol& b);

/// Phase-space module norm of a sampled symbol.
double phase_space_norm(const SampledSymbol& a);

}  // namespace pdo
