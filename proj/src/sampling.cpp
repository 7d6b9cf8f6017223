#include "pdo/sampling.hpp"

#include <cmath>
#include <string>

#include "pdo/detail/blocks.hpp"
#include "pdo/error.hpp"

namespace pdo {

const char* to_string(DecayClass d) noexcept {
    return d == DecayClass::schwartz ? "schwartz" : "bounded";
}

DecayClass decay_class_from_string(const std::string& s) {
    if (s == "schwartz") return DecayClass::schwartz;
    if (s == "bounded") return DecayClass::bounded;
    throw InvalidInput("unknown decay class '" + s + "'");
}

// ---------------------------------------------------------------- ModuleFunction

ModuleFunction::ModuleFunction(GridSpec grid, int k, DecayClass decay)
    : grid_(grid), k_(k), decay_(decay) {
    if (k <= 0) throw InvalidInput("algebra dimension must be positive");
    values_.assign(grid_.size() * block_size(), Complex{});
}

ModuleFunction::ModuleFunction(GridSpec grid, int k, DecayClass decay, std::vector<Complex> values)
    : grid_(grid), k_(k), decay_(decay), values_(std::move(values)) {
    if (k <= 0) throw InvalidInput("algebra dimension must be positive");
    if (values_.size() != grid_.size() * block_size())
        throw ShapeError("sample array does not match grid and algebra dimension");
}

ModuleFunction ModuleFunction::sample(const GridSpec& grid, int k, DecayClass decay,
                                      const std::function<void(const Point&, std::span<Complex>)>& f) {
    ModuleFunction out(grid, k, decay);
    for (std::size_t i = 0; i < out.size(); ++i) f(grid.point(i), out.block(i));
    return out;
}

ModuleFunction ModuleFunction::with_decay(DecayClass d) const {
    ModuleFunction out = *this;
    out.decay_ = d;
    return out;
}

ModuleFunction& ModuleFunction::operator+=(const ModuleFunction& o) {
    if (!(grid_ == o.grid_) || k_ != o.k_) throw ShapeError("module function shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    if (o.decay_ == DecayClass::bounded) decay_ = DecayClass::bounded;
    return *this;
}

ModuleFunction& ModuleFunction::operator-=(const ModuleFunction& o) {
    if (!(grid_ == o.grid_) || k_ != o.k_) throw ShapeError("module function shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    if (o.decay_ == DecayClass::bounded) decay_ = DecayClass::bounded;
    return *this;
}

ModuleFunction& ModuleFunction::operator*=(Complex c) {
    for (auto& v : values_) v *= c;
    return *this;
}

ModuleFunction ModuleFunction::right_multiply(const AlgebraElement& a) const {
    if (a.dim() != k_) throw ShapeError("algebra dimension mismatch");
    ModuleFunction out(grid_, k_, decay_);
    for (std::size_t i = 0; i < size(); ++i)
        detail::mul_add(out.block(i).data(), block(i).data(), a.block().data(), k_);
    return out;
}

ModuleFunction ModuleFunction::left_multiply(const AlgebraElement& a) const {
    if (a.dim() != k_) throw ShapeError("algebra dimension mismatch");
    ModuleFunction out(grid_, k_, decay_);
    for (std::size_t i = 0; i < size(); ++i)
        detail::mul_add(out.block(i).data(), a.block().data(), block(i).data(), k_);
    return out;
}

double ModuleFunction::sup_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, cstar_norm(block(i), k_));
    return m;
}

double ModuleFunction::shell_sup_norm() const {
    const double edge = 0.9 * grid_.half_width();
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const Point p = grid_.point(i);
        bool in_shell = false;
        for (int a = 0; a < grid_.n(); ++a)
            if (std::abs(p[static_cast<std::size_t>(a)]) >= edge) in_shell = true;
        if (in_shell) m = std::max(m, cstar_norm(block(i), k_));
    }
    return m;
}

bool ModuleFunction::satisfies_decay(double rel) const { return shell_sup_norm() <= rel * sup_norm(); }

void ModuleFunction::require_schwartz(const char* operation) const {
    if (decay_ != DecayClass::schwartz)
        throw PreconditionError(std::string(operation) + ": input is a bounded field, a rapidly decreasing function is required");
    if (!satisfies_decay())
        throw PreconditionError(std::string(operation) +
                                ": input does not decay at the box boundary (truncation invalid)");
}

// ----------------------------------------------------------------- SampledSymbol

SampledSymbol::SampledSymbol(GridSpec grid_x, GridSpec grid_xi, int k, DecayClass decay)
    : grid_x_(grid_x), grid_xi_(grid_xi), k_(k), decay_(decay) {
    if (k <= 0) throw InvalidInput("algebra dimension must be positive");
    if (grid_x.n() != grid_xi.n()) throw ShapeError("symbol grids must share the dimension n");
    values_.assign(size() * block_size(), Complex{});
}

SampledSymbol SampledSymbol::sample(
    const GridSpec& grid_x, const GridSpec& grid_xi, int k, DecayClass decay,
    const std::function<void(const Point&, const Point&, std::span<Complex>)>& f) {
    SampledSymbol out(grid_x, grid_xi, k, decay);
    for (std::size_t ix = 0; ix < grid_x.size(); ++ix) {
        const Point x = grid_x.point(ix);
        for (std::size_t ixi = 0; ixi < grid_xi.size(); ++ixi) f(x, grid_xi.point(ixi), out.block(ix, ixi));
    }
    return out;
}

void SampledSymbol::check_compatible(const SampledSymbol& o) const {
    if (!(grid_x_ == o.grid_x_) || !(grid_xi_ == o.grid_xi_) || k_ != o.k_)
        throw ShapeError("symbol shape mismatch");
}

SampledSymbol& SampledSymbol::operator+=(const SampledSymbol& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    if (o.decay_ == DecayClass::bounded) decay_ = DecayClass::bounded;
    return *this;
}

SampledSymbol& SampledSymbol::operator-=(const SampledSymbol& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    if (o.decay_ == DecayClass::bounded) decay_ = DecayClass::bounded;
    return *this;
}

SampledSymbol& SampledSymbol::operator*=(Complex c) {
    for (auto& v : values_) v *= c;
    return *this;
}

double SampledSymbol::sup_norm() const {
    double m = 0.0;
    const std::size_t bs = block_size();
    for (std::size_t i = 0; i < size(); ++i)
        m = std::max(m, cstar_norm(std::span<const Complex>(values_.data() + i * bs, bs), k_));
    return m;
}

// ------------------------------------------------------------------- reductions

namespace {

constexpr std::size_t kLeafSize = 16;

// Sum of f_i^* g_i over [lo, hi) by recursive halving.
void pairwise_gram(const Complex* f, const Complex* g, int k, std::size_t lo, std::size_t hi, Complex* out) {
    const std::size_t bs = static_cast<std::size_t>(k) * k;
    if (hi - lo <= kLeafSize) {
        for (std::size_t i = lo; i < hi; ++i) detail::adj_mul_add(out, f + i * bs, g + i * bs, k);
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::vector<Complex> right(bs, Complex{});
    pairwise_gram(f, g, k, lo, mid, out);
    pairwise_gram(f, g, k, mid, hi, right.data());
    for (std::size_t j = 0; j < bs; ++j) out[j] += right[j];
}

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= kLeafSize) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

AlgebraElement module_inner(const ModuleFunction& f, const ModuleFunction& g) {
    if (!(f.grid() == g.grid())) throw ShapeError("module_inner: grid mismatch");
    if (f.k() != g.k()) throw ShapeError("module_inner: algebra dimension mismatch");
    AlgebraElement out(f.k());
    Matrix acc = Matrix::Zero(f.k(), f.k());
    pairwise_gram(f.values().data(), g.values().data(), f.k(), 0, f.size(), acc.data());
    return AlgebraElement(Matrix(acc * f.grid().cell_volume()));
}

double module_norm(const ModuleFunction& f) { return std::sqrt(cstar_norm(module_inner(f, f))); }

double l2_norm(const ModuleFunction& f) {
    std::vector<double> sq(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double s = cstar_norm(f.block(i), f.k());
        sq[i] = s * s;
    }
    return std::sqrt(pairwise_sum(sq, 0, sq.size()) * f.grid().cell_volume());
}

AlgebraElement phase_space_inner(const SampledSymbol& a, const SampledSymbol& b) {
    if (!(a.grid_x() == b.grid_x()) || !(a.grid_xi() == b.grid_xi()) || a.k() != b.k())
        throw ShapeError("phase_space_inner: shape mismatch");
    Matrix acc = Matrix::Zero(a.k(), a.k());
    pairwise_gram(a.values().data(), b.values().data(), a.k(), 0, a.size(), acc.data());
    return AlgebraElement(Matrix(acc * (a.grid_x().cell_volume() * a.grid_xi().cell_volume())));
}

double phase_space_norm(const SampledSymbol& a) { return std::sqrt(cstar_norm(phase_space_inner(a, a))); }

}  // namespace pdo
