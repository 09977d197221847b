#pragma once

// Library-free Airy functions for test oracles: Maclaurin series for
// moderate arguments and the large-negative-argument asymptotic expansion.

#include <cmath>
#include <numbers>

namespace oracle {

struct Airy {
    double ai, aip, bi, bip;
};

/// Ai, Ai', Bi, Bi' by power series in long double; accurate to ~1e-12 for |z| <= 10.
inline Airy airy_series(double zd) {
    const long double z = zd;
    const long double c1 = 0.355028053887817239260063186004L;  // Ai(0)
    const long double c2 = 0.258819403792806798405183560189L;  // -Ai'(0)
    long double f = 0, fp = 0, g = 0, gp = 0;
    long double a = 1, b = 1;  // coefficients of z^(3k) in f and z^(3k+1) in g
    for (int k = 0; k < 80; ++k) {
        const long double z3k = std::pow(z, 3 * k);
        f += a * z3k;
        g += b * z3k * z;
        if (k > 0) fp += 3 * k * a * z3k / z;
        gp += (3 * k + 1) * b * z3k;
        a /= (3.0L * k + 2) * (3.0L * k + 3);
        b /= (3.0L * k + 3) * (3.0L * k + 4);
    }
    if (z == 0) fp = 0;
    const long double s3 = std::sqrt(3.0L);
    return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp),
            static_cast<double>(s3 * (c1 * f + c2 * g)), static_cast<double>(s3 * (c1 * fp + c2 * gp))};
}

/// Ai(-z), Ai'(-z), Bi(-z), Bi'(-z) for large positive z (derivatives with
/// respect to the Airy argument).
inline Airy airy_negative_asymptotic(double z, int terms = 10) {
    const double xi = 2.0 / 3.0 * std::pow(z, 1.5);
    double u[2 * 12 + 2], v[2 * 12 + 2];
    u[0] = v[0] = 1.0;
    for (int k = 1; k < 2 * terms + 2; ++k) {
        u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
        v[k] = -(6.0 * k + 1) / (6.0 * k - 1) * u[k];
    }
    double ue = 0, uo = 0, ve = 0, vo = 0, sign = 1.0;
    for (int k = 0; k < terms; ++k) {
        ue += sign * u[2 * k] * std::pow(xi, -2 * k);
        uo += sign * u[2 * k + 1] * std::pow(xi, -2 * k - 1);
        ve += sign * v[2 * k] * std::pow(xi, -2 * k);
        vo += sign * v[2 * k + 1] * std::pow(xi, -2 * k - 1);
        sign = -sign;
    }
    const double c = std::cos(xi - std::numbers::pi / 4), s = std::sin(xi - std::numbers::pi / 4);
    const double pre = 1.0 / std::sqrt(std::numbers::pi);
    const double lo = pre * std::pow(z, -0.25), hi = pre * std::pow(z, 0.25);
    return {lo * (c * ue + s * uo), hi * (s * ve - c * vo), lo * (-s * ue + c * uo), hi * (c * ve + s * vo)};
}

inline Airy airy(double z) { return z < -9.0 ? airy_negative_asymptotic(-z) : airy_series(z); }

/// Coefficients (p, q) of f = p Ai(z) + q Bi(z) with f(z0) = f0, f'(z0) = f1
/// (Wronskian Ai Bi' - Ai' Bi = 1/pi).
inline std::pair<double, double> airy_combination(double z0, double f0, double f1) {
    const Airy a = airy(z0);
    const double p = std::numbers::pi * (f0 * a.bip - f1 * a.bi);
    const double q = std::numbers::pi * (f1 * a.ai - f0 * a.aip);
    return {p, q};
}

}  // namespace oracle
