#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "msac/error.hpp"
#include "msac/stationary/bounds.hpp"

namespace msac::tdse {

/// Imaginary layer -i eta(x) on both diagonal potentials for |x| > onset,
/// eta = strength cos^2(pi/2 (x_max - |x|) / (x_max - onset)): zero at the
/// onset, maximal at the grid edge.
struct Absorber {
    double onset = 0.0;
    double strength = 1.0;
    double x_max = 0.0;

    [[nodiscard]] bool active() const noexcept { return strength > 0.0 && onset < x_max; }

    [[nodiscard]] double eta(double x) const noexcept {
        const double ax = std::abs(x);
        if (!active() || ax <= onset) return 0.0;
        const double c = std::cos(0.5 * std::numbers::pi * (x_max - ax) / (x_max - onset));
        return strength * c * c;
    }
};

struct AbsorberOptions {
    /// Onset at the norm boundary with this many semiclassical 1/e decay
    /// lengths of the closed channel past the turning point.
    double decay_exponent = 6.0;
    /// Absorbing layer width; the grid is padded when the stationary range
    /// ends closer than this to the onset.
    double width = 6.0;
    double strength = 20.0;
};

/// Absorber for a level at W. The layer runs from the onset to
/// max(x_max, onset + width).
inline Absorber make_absorber(double V, double W, double x_max, const AbsorberOptions& opt = {}) {
    if (!(opt.strength >= 0.0) || !(opt.width > 0.0) || !(opt.decay_exponent > 0.0)) {
        throw DomainError("make_absorber: strength, width and decay exponent must be positive");
    }
    const double x_l = stationary::turning_point(V, W);
    const double onset = stationary::norm_boundary(V, W, opt.decay_exponent);
    if (!(onset > x_l)) throw DomainError("make_absorber: onset must lie outside the turning point");
    return Absorber{onset, opt.strength, std::max(x_max, onset + opt.width)};
}

/// Layer that never absorbs (unitary propagation).
inline Absorber no_absorber(double x_max) { return Absorber{x_max, 0.0, x_max}; }

}  // namespace msac::tdse
