#pragma once

// Scaled units for two linear diabats with opposite slopes and a constant
// coupling. In these units the model depends on the single coupling V.

#include <cmath>
#include <optional>

#include "msac/error.hpp"

namespace msac::model {

/// Physical inputs: mass, differential slope (energy/length), coupling
/// energy and hbar, all in one consistent unit system.
struct PhysicalInputs {
    double mass = 1.0;
    double alpha = 1.0;
    double coupling = 1.0;
    double hbar = 1.0;
};

struct ScaledParams {
    double V = 1.0;   ///< dimensionless coupling
    double l0 = 1.0;  ///< length unit
    double w0 = 1.0;  ///< energy unit
    double t0 = 1.0;  ///< time unit
    double f0 = 1.0;  ///< angular frequency unit
    std::optional<PhysicalInputs> physical;

    [[nodiscard]] double to_physical_length(double x) const { return x * l0; }
    [[nodiscard]] double to_physical_energy(double w) const { return w * w0; }
    [[nodiscard]] double to_physical_time(double t) const { return t * t0; }
    [[nodiscard]] double to_scaled_length(double x) const { return x / l0; }
    [[nodiscard]] double to_scaled_energy(double w) const { return w / w0; }
    [[nodiscard]] double to_scaled_time(double t) const { return t / t0; }
};

/// Parameters for a purely scaled run (all unit factors 1).
inline ScaledParams scaled_only(double V) {
    if (!(V > 0.0)) throw DomainError("coupling V must be positive");
    ScaledParams p;
    p.V = V;
    return p;
}

/// l0 = (hbar^2/(M alpha))^(1/3), w0 = hbar^2/(M l0^2), t0 = hbar/w0,
/// f0 = w0/hbar and V = V_p/w0.
inline ScaledParams scale_physical(const PhysicalInputs& in) {
    if (!(in.mass > 0.0) || !(in.alpha > 0.0) || !(in.coupling > 0.0) || !(in.hbar > 0.0)) {
        throw DomainError("scale_physical: mass, slope, coupling and hbar must all be positive");
    }
    ScaledParams p;
    p.l0 = std::cbrt(in.hbar * in.hbar / (in.mass * in.alpha));
    p.w0 = in.hbar * in.hbar / (in.mass * p.l0 * p.l0);
    p.t0 = in.hbar / p.w0;
    p.f0 = p.w0 / in.hbar;
    p.V = in.coupling / p.w0;
    p.physical = in;
    return p;
}

inline ScaledParams scale_physical(double mass, double alpha, double coupling, double hbar) {
    return scale_physical(PhysicalInputs{mass, alpha, coupling, hbar});
}

}  // namespace msac::model
