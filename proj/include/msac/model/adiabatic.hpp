#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "msac/error.hpp"

namespace msac::model {

/// Adiabatic eigensystem of the scaled diabatic potential matrix
/// [[-x/2, V], [V, x/2]] at one position.
///
/// The upper eigenvector is |u> = (cos theta, sin theta) and the lower one
/// |d> = (-sin theta, cos theta) in the diabatic basis {|1>, |2>}, with
/// theta = atan2(V, -x/2)/2 running smoothly from 0 (x -> -inf) through
/// pi/4 (x = 0) to pi/2 (x -> +inf). With this phase choice
///   A_du = -theta',  A_ud = +theta',
///   B_du = -theta''/2, B_ud = +theta''/2, B_uu = B_dd = theta'^2/2.
struct AdiabaticPoint {
    double x = 0.0;
    double V_u = 0.0;
    double V_d = 0.0;
    double theta = 0.0;
    double A_du = 0.0;
    double B_du = 0.0;
    double B_uu = 0.0;
    double B_dd = 0.0;
    double Vt_u = 0.0;  ///< V_u + B_uu
    double Vt_d = 0.0;  ///< V_d + B_dd

    [[nodiscard]] double A_ud() const noexcept { return -A_du; }
    [[nodiscard]] double B_ud() const noexcept { return -B_du; }
};

/// d theta / dx = V / (x^2 + 4 V^2).
inline double mixing_angle_derivative(double x, double V) noexcept {
    return V / (x * x + 4.0 * V * V);
}

inline double mixing_angle(double x, double V) noexcept {
    return 0.5 * std::atan2(V, -0.5 * x);
}

inline double upper_potential(double x, double V) noexcept {
    return std::sqrt(0.25 * x * x + V * V);
}

inline AdiabaticPoint adiabatic_point(double x, double V) {
    if (!(V > 0.0)) throw DomainError("adiabatic_point: V must be positive");
    const double denom = x * x + 4.0 * V * V;
    const double dtheta = V / denom;
    const double d2theta = -2.0 * V * x / (denom * denom);

    AdiabaticPoint p;
    p.x = x;
    p.V_u = upper_potential(x, V);
    p.V_d = -p.V_u;
    p.theta = mixing_angle(x, V);
    p.A_du = -dtheta;
    p.B_du = -0.5 * d2theta;
    p.B_uu = 0.5 * dtheta * dtheta;
    p.B_dd = p.B_uu;
    p.Vt_u = p.V_u + p.B_uu;
    p.Vt_d = p.V_d + p.B_dd;
    return p;
}

/// Harmonic angular frequency of V_u about x = 0.
inline double harmonic_frequency(double V) noexcept { return 0.5 / std::sqrt(V); }

/// Ground-state position spread of the harmonic approximation, V^(1/4).
inline double harmonic_width(double V) noexcept { return std::pow(V, 0.25); }

enum class Direction { to_adiabatic, to_diabatic };

/// Rotate one component pair by the mixing angle at x.
/// Diabatic order is (psi_1, psi_2); adiabatic order is (psi_u, psi_d).
template <class T>
std::pair<T, T> basis_transform(const std::pair<T, T>& in, Direction dir, double x, double V) {
    const double th = mixing_angle(x, V);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const auto& [a, b] = in;
    if (dir == Direction::to_adiabatic) {
        return {c * a + s * b, -s * a + c * b};
    }
    return {c * a - s * b, s * a + c * b};
}

}  // namespace msac::model
