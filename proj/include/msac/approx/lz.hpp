#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "msac/error.hpp"

namespace msac::approx {

/// Velocity rule at the crossing. The default sqrt(2 W) is the empirical
/// choice; the others are kept for comparison.
enum class VelocityRule { two_W, W_minus_V, two_W_minus_V };

struct LzResult {
    double R = 0.0;      ///< attempt rate (W_{nu+1} - W_{nu-1}) / pi
    double v = 0.0;
    double P_LZ = 0.0;
    double tau = 0.0;
    bool reflected_lower = false;  ///< W_{nu-1} reflected about W_0
    bool reflected_upper = false;  ///< W_{nu+1} reflected about the top level
};

inline double crossing_velocity(double V, double W, VelocityRule rule) {
    double v2 = 0.0;
    switch (rule) {
        case VelocityRule::two_W: v2 = 2.0 * W; break;
        case VelocityRule::W_minus_V: v2 = W - V; break;
        case VelocityRule::two_W_minus_V: v2 = 2.0 * (W - V); break;
    }
    if (!(v2 > 0.0)) throw DomainError("crossing_velocity: non-positive kinetic energy");
    return std::sqrt(v2);
}

/// tau_LZ = 1 / (R P_LZ), P_LZ = exp(-2 pi V^2 / (s v)) with diabatic slope
/// difference s = 1.
inline LzResult lz_lifetime(double V, double W_prev, double W_nu, double W_next,
                            VelocityRule rule = VelocityRule::two_W) {
    if (!(V > 0.0)) throw DomainError("lz_lifetime: V must be positive");
    if (!(W_next > W_prev)) throw DomainError("lz_lifetime: energies out of order");
    LzResult r;
    r.R = (W_next - W_prev) / std::numbers::pi;
    r.v = crossing_velocity(V, W_nu, rule);
    r.P_LZ = std::exp(-2.0 * std::numbers::pi * V * V / r.v);
    r.tau = 1.0 / (r.R * r.P_LZ);
    return r;
}

/// LZ lifetime of level nu from an ordered energy list. Missing neighbours
/// are reflected: W_{-1} = 2 W_0 - W_1 below the first level and
/// W_{n} = 2 W_{n-1} - W_{n-2} above the last one.
inline LzResult lz_lifetime(double V, const std::vector<double>& W, std::size_t nu,
                            VelocityRule rule = VelocityRule::two_W) {
    if (W.size() < 2 || nu >= W.size()) throw RangeError("lz_lifetime: need level nu and at least one neighbour");
    const bool low = nu == 0;
    const bool high = nu + 1 == W.size();
    const double prev = low ? 2.0 * W[0] - W[1] : W[nu - 1];
    const double next = high ? 2.0 * W[nu] - W[nu - 1] : W[nu + 1];
    LzResult r = lz_lifetime(V, prev, W[nu], next, rule);
    r.reflected_lower = low;
    r.reflected_upper = high;
    return r;
}

/// Q = tau omega with the harmonic frequency omega = 1 / (2 sqrt(V)).
inline double q_factor(double tau, double V) {
    if (!(tau > 0.0) || !(V > 0.0)) throw DomainError("q_factor: tau and V must be positive");
    return tau / (2.0 * std::sqrt(V));
}

}  // namespace msac::approx
