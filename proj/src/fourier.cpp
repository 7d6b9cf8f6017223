#include "pdo/fourier.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "pdo/detail/fft.hpp"

namespace pdo {

namespace {

// Shared body of both directions; `sign` is the exponent sign of the kernel.
ModuleFunction transform(const ModuleFunction& f, int sign, DecayClass result_decay) {
    const GridSpec& g = f.grid();
    const GridSpec out_grid = g.dual();
    const int n = g.n();
    const int N = g.points_per_axis();
    const std::size_t bs = f.block_size();

    std::vector<Complex> data = f.values();
    std::array<int, kMaxDim> dims{N, N};

    // (-1)^{|j|} before and (-1)^{|m|} after; the global sign and the
    // measure factor are folded into one scale.
    auto flip = [&](std::vector<Complex>& v) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto idx = g.multi_index(i);
            int parity = 0;
            for (int a = 0; a < n; ++a) parity += idx[static_cast<std::size_t>(a)];
            if (parity & 1)
                for (std::size_t c = 0; c < bs; ++c) v[i * bs + c] = -v[i * bs + c];
        }
    };
    flip(data);
    detail::fft_many(data.data(), std::span<const int>(dims.data(), static_cast<std::size_t>(n)),
                     static_cast<int>(bs), sign);
    flip(data);

    const double global = ((n * N / 2) % 2 == 0) ? 1.0 : -1.0;
    const double scale = global * g.cell_volume() / std::pow(2.0 * std::numbers::pi, 0.5 * n);
    for (auto& v : data) v *= scale;
    return ModuleFunction(out_grid, f.k(), result_decay, std::move(data));
}

}  // namespace

ModuleFunction fourier(const ModuleFunction& f) {
    f.require_schwartz("fourier");
    return transform(f, -1, DecayClass::schwartz);
}

ModuleFunction inverse_fourier(const ModuleFunction& f) {
    f.require_schwartz("inverse_fourier");
    return transform(f, +1, DecayClass::schwartz);
}

ModuleFunction fourier_direct(const ModuleFunction& f) {
    f.require_schwartz("fourier_direct");
    const GridSpec& g = f.grid();
    const GridSpec d = g.dual();
    const int n = g.n();
    const double scale = g.cell_volume() / std::pow(2.0 * std::numbers::pi, 0.5 * n);
    ModuleFunction out(d, f.k(), DecayClass::schwartz);
    for (std::size_t m = 0; m < d.size(); ++m) {
        const Point xi = d.point(m);
        auto dst = out.block(m);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const Point x = g.point(j);
            double phase = 0.0;
            for (int a = 0; a < n; ++a) phase -= xi[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
            const Complex e = std::polar(scale, phase);
            const auto src = f.block(j);
            for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += e * src[c];
        }
    }
    return out;
}

ModuleFunction fourier_unchecked(const ModuleFunction& f, DecayClass result_decay) {
    return transform(f, -1, result_decay);
}

ModuleFunction inverse_fourier_unchecked(const ModuleFunction& f, DecayClass result_decay) {
    return transform(f, +1, result_decay);
}

}  // namespace pdo
