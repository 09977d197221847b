#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/numerics/quadrature.hpp"
#include "msac/stationary/bounds.hpp"
#include "msac/stationary/tail_fit.hpp"
#include "msac/wave.hpp"

namespace msac::stationary {

struct FluxOptions {
    double r_k = 3.0;
    /// Tail fits use the last allowed-component extremum inside x_max - offset.
    double fit_offset = 1.0;
};

struct FluxResult {
    double tau = 0.0;
    double gamma = 0.0;
    double P0 = 0.0;
    double x_k = 0.0;
    double x_p = 0.0;
    std::array<TailFit, 2> fits;  ///< diabatic components psi_1, psi_2
};

/// Norm over [-x, x] on the wave's grid (composite Simpson).
template <class T>
double central_norm(const TwoComponentWave<T>& wave, double x) {
    const auto& g = wave.grid;
    const std::size_t lo = g.index_of(-x);
    const std::size_t hi = g.index_of(x);
    std::vector<double> dens(hi - lo + 1);
    for (std::size_t i = lo; i <= hi; ++i) dens[i - lo] = std::norm(wave.psi[0][i]) + std::norm(wave.psi[1][i]);
    return numerics::simpson(dens, g.dx());
}

/// Flux lifetime tau = P_0 / (2 (k_1 a_1^2 + k_2 a_2^2)) of a stationary
/// resonance wave. Amplitudes come from three-point fits of the diabatic
/// components around the last extremum of the allowed component; adiabatic
/// waves are rotated to the diabatic basis at those three samples only.
inline FluxResult lifetime_flux(const RealWave& wave, const FluxOptions& opt = {}) {
    const auto& g = wave.grid;
    FluxResult out;
    out.x_k = norm_boundary(wave.V, wave.W, opt.r_k);
    if (out.x_k > g.x_max()) throw RangeError("lifetime_flux: norm boundary x_k beyond the grid");
    out.P0 = central_norm(wave, out.x_k);

    const double near = g.x_max() - opt.fit_offset;
    const auto& allowed = wave.psi[allowed_component(wave.representation)];
    const double k_est = std::sqrt(std::max(2.0 * wave.W + near, 1e-6));
    const auto window = static_cast<std::size_t>(2.0 * std::numbers::pi / k_est / g.dx()) + 4;
    const std::size_t p = find_extremum_before(allowed, g.index_of(near), window);
    out.x_p = g.x(p);

    std::array<std::array<double, 3>, 2> dia{};
    for (std::size_t m = 0; m < 3; ++m) {
        const std::size_t i = p - 1 + m;
        std::pair<double, double> v{wave.psi[0][i], wave.psi[1][i]};
        if (wave.representation == Representation::adiabatic) {
            v = model::basis_transform(v, model::Direction::to_diabatic, g.x(i), wave.V);
        }
        dia[0][m] = v.first;
        dia[1][m] = v.second;
    }
    double flux = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
        out.fits[c] = fit_three_point(dia[c], 1, out.x_p, g.dx());
        flux += out.fits[c].k * out.fits[c].a * out.fits[c].a;
    }
    out.gamma = 2.0 * flux / out.P0;
    out.tau = 1.0 / out.gamma;
    return out;
}

}  // namespace msac::stationary
