#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <type_traits>
#include <cstddef>
#include <span>

#include "msac/error.hpp"
#include "msac/wave.hpp"

namespace msac::stationary {

/// Local sinusoid a cos(k x + phase) through three adjacent samples.
struct TailFit {
    double x_p = 0.0;
    std::size_t index = 0;
    double k = 0.0;
    double a = 0.0;
    double phase = 0.0;
    bool oscillatory = true;  ///< false when the samples curve away from zero

    [[nodiscard]] double operator()(double x) const { return a * std::cos(k * x + phase); }
};

/// Fit the sinusoid through samples (i-1, i, i+1) of f.
///
/// For oscillating samples k = acos((f+ + f-)/(2 f0))/dx, which reproduces
/// all three samples exactly and tends to sqrt(|f''/f|) as dx -> 0. The
/// amplitude is a = sqrt(f0^2 + (f'/k)^2) with the centred slope f'.
inline TailFit fit_three_point(std::span<const double> f, std::size_t i, double x_i, double dx) {
    if (i == 0 || i + 1 >= f.size()) throw RangeError("fit_three_point: needs both neighbours");
    const double fm = f[i - 1];
    const double f0 = f[i];
    const double fp = f[i + 1];
    if (f0 == 0.0 || !std::isfinite(f0)) throw FitError("fit_three_point: centre sample vanishes");
    const double ratio = (fp + fm) / (2.0 * f0);
    TailFit fit;
    fit.x_p = x_i;
    fit.index = i;
    if (ratio < 1.0 && ratio > -1.0) {
        fit.k = std::acos(ratio) / dx;
        const double a_sin = -(fp - fm) / (2.0 * std::sin(fit.k * dx));  // a sin(k x_i + phase)
        fit.a = std::hypot(f0, a_sin);
        fit.phase = std::atan2(a_sin, f0) - fit.k * x_i;
        fit.phase = std::atan2(std::sin(fit.phase), std::cos(fit.phase));
    } else {
        const double second = (fp - 2.0 * f0 + fm) / (dx * dx);
        const double slope = (fp - fm) / (2.0 * dx);
        fit.k = std::sqrt(std::abs(second / f0));
        fit.a = fit.k > 0.0 ? std::hypot(f0, slope / fit.k) : std::abs(f0);
        fit.phase = std::atan2(-slope / fit.k, f0) - fit.k * x_i;
        fit.oscillatory = false;
    }
    return fit;
}

/// Index of the extremum of f closest below `near_index`, searching at most
/// `max_back` samples. Throws RangeError when none is found.
inline std::size_t find_extremum_before(std::span<const double> f, std::size_t near_index, std::size_t max_back) {
    if (near_index + 1 >= f.size()) near_index = f.size() - 2;
    const std::size_t stop = near_index > max_back ? near_index - max_back : 1;
    for (std::size_t i = near_index; i >= stop && i >= 1; --i) {
        const double left = f[i] - f[i - 1];
        const double right = f[i + 1] - f[i];
        if (left * right <= 0.0 && std::abs(f[i]) >= std::abs(f[i - 1]) && std::abs(f[i]) >= std::abs(f[i + 1])) {
            return i;
        }
        if (i == stop) break;
    }
    throw RangeError("find_extremum_before: no extremum of the allowed component in the search window");
}

/// Tail fit of one component of a stationary wave at the last extremum of
/// the allowed component at or inside x = near.
template <class T>
TailFit tail_fit(const TwoComponentWave<T>& wave, std::size_t component, double near) {
    static_assert(std::is_same_v<T, double>, "tail fits need real stationary waves");
    const auto& g = wave.grid;
    const std::size_t near_index = g.index_of(near);
    const auto& allowed = wave.psi[allowed_component(wave.representation)];
    // One local wavelength of the allowed tail, with margin.
    const double k_est = std::sqrt(std::max(2.0 * wave.W + near, 1e-6));
    const auto window = static_cast<std::size_t>(2.0 * std::numbers::pi / k_est / g.dx()) + 4;
    const std::size_t p = find_extremum_before(allowed, near_index, window);
    const auto fit = fit_three_point(wave.psi[component], p, g.x(p), g.dx());
    double scale = 0.0;
    for (const auto& comp : wave.psi)
        for (double v : comp) scale = std::max(scale, std::abs(v));
    if (std::abs(wave.psi[component][p]) < 1e-13 * scale) {
        throw FitError("tail_fit: tail sample below the numerical noise floor");
    }
    return fit;
}

}  // namespace msac::stationary
