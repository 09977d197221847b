#pragma once

#include <cmath>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"

namespace msac::stationary {

/// Positive classical turning point of energy W on V_u.
inline double turning_point(double V, double W) {
    if (!(W > V)) throw DomainError("turning_point: no turning point on V_u for W <= V");
    return 2.0 * std::sqrt(W * W - V * V);
}

/// Norm boundary x_k > x_l where int_{x_l}^{x_k} sqrt(2 (V_u - W)) dx = r_k,
/// i.e. r_k semiclassical 1/e decay lengths past the turning point on V_u.
inline double norm_boundary(double V, double W, double r_k = 3.0, double x_limit = 200.0) {
    if (!(r_k > 0.0)) throw DomainError("norm_boundary: r_k must be positive");
    const double xl = turning_point(V, W);
    // kappa ~ sqrt(x - x_l) near the turning point: substitute x = x_l + t^2
    // so the integrand 2 t kappa is smooth, then march in t.
    auto integrand = [&](double t) {
        const double x = xl + t * t;
        const double gap = model::upper_potential(x, V) - W;
        return gap > 0.0 ? 2.0 * t * std::sqrt(2.0 * gap) : 0.0;
    };
    const double h = 1e-3;
    double acc = 0.0;
    double t = 0.0;
    double f0 = integrand(0.0);
    while (xl + t * t < x_limit) {
        const double fm = integrand(t + 0.5 * h);
        const double f1 = integrand(t + h);
        const double piece = h / 6.0 * (f0 + 4.0 * fm + f1);
        if (acc + piece >= r_k) {
            // Linear interpolation inside the final step.
            const double frac = (r_k - acc) / piece;
            const double tk = t + frac * h;
            return xl + tk * tk;
        }
        acc += piece;
        t += h;
        f0 = f1;
    }
    throw RangeError("norm_boundary: x_k beyond search limit");
}

}  // namespace msac::stationary
