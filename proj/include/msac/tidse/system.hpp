#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/wave.hpp"

namespace msac::tidse {

/// Integration range x_max as a function of (V, W). The default rises
/// linearly from 13 (weak coupling, lowest energies) to 19 (strong
/// coupling, top of the energy window).
struct XmaxSchedule {
    double x_low = 13.0;
    double x_high = 19.0;
    double V_low = 0.306;
    double V_high = 2.75;
    double energy_span = 3.8;
    std::optional<double> fixed;

    [[nodiscard]] double operator()(double V, double W) const {
        if (fixed) return *fixed;
        const double t = 0.5 * (V - V_low) / (V_high - V_low) + 0.5 * (W - V) / energy_span;
        return x_low + (x_high - x_low) * std::clamp(t, 0.0, 1.0);
    }

    [[nodiscard]] double upper_bound() const { return fixed ? *fixed : std::max(x_low, x_high); }
};

/// Potential seen by the component that is open at large positive x:
/// -x/2 for psi_1 (diabatic), V~_d(x) for psi_d (adiabatic).
inline double allowed_potential(Representation rep, double V, double x) {
    if (rep == Representation::diabatic) return -0.5 * x;
    return model::adiabatic_point(x, V).Vt_d;
}

inline double allowed_potential_slope(Representation rep, double V, double x) {
    if (rep == Representation::diabatic) return -0.5;
    const double denom = x * x + 4.0 * V * V;
    const double dtheta = V / denom;
    const double d2theta = -2.0 * V * x / (denom * denom);
    return -0.25 * x / model::upper_potential(x, V) + dtheta * d2theta;
}

/// Local wave number sqrt(2 (W - P(x))) of the allowed component.
inline double allowed_wave_number(Representation rep, double V, double W, double x) {
    const double kin = 2.0 * (W - allowed_potential(rep, V, x));
    if (!(kin > 0.0)) throw RangeError("allowed_wave_number: point is classically forbidden");
    return std::sqrt(kin);
}

/// Phase-insensitive amplitude of a WKB wave a(x) cos(S(x)) from the value
/// and slope at one point; k' = -P'/k removes the first-order ripple.
inline double wkb_amplitude(double psi, double dpsi, double k, double dk) {
    const double q = (dpsi + 0.5 * dk / k * psi) / k;
    return std::sqrt(psi * psi + q * q);
}

/// Coefficient tables of the real coupled second-order system
///   a'' = 2 (p_a - W) a + 2 c_ab b + 2 d_ab b'
///   b'' = 2 (p_b - W) b + 2 c_ba a + 2 d_ba a'
/// sampled at half steps x = j dx / 2. (a, b) = (psi_1, psi_2) in the
/// diabatic and (psi_u, psi_d) in the adiabatic representation.
class CoupledSystem {
public:
    struct Coefficients {
        double pa, pb, cab, cba, dab, dba;
    };

    CoupledSystem(Representation rep, double V, double dx, double x_end)
        : rep_(rep), V_(V), dx_(dx) {
        // V = 0 is the decoupled diabatic limit; the adiabatic basis needs V > 0.
        if (!(V > 0.0) && !(rep == Representation::diabatic && V == 0.0))
            throw DomainError("CoupledSystem: V must be positive");
        if (!(dx > 0.0) || !(x_end > dx)) throw DomainError("CoupledSystem: bad step or range");
        nodes_ = static_cast<std::size_t>(std::llround(x_end / dx)) + 1;
        table_.resize(2 * nodes_ + 1);
        for (std::size_t j = 0; j < table_.size(); ++j) {
            const double x = 0.5 * dx * static_cast<double>(j);
            if (rep == Representation::diabatic) {
                table_[j] = {-0.5 * x, 0.5 * x, V, V, 0.0, 0.0};
            } else {
                const auto p = model::adiabatic_point(x, V);
                // psi_u row couples through (B_ud, A_ud), psi_d row through (B_du, A_du).
                table_[j] = {p.Vt_u, p.Vt_d, p.B_ud(), p.B_du, p.A_ud(), p.A_du};
            }
        }
    }

    [[nodiscard]] Representation representation() const noexcept { return rep_; }
    [[nodiscard]] double V() const noexcept { return V_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }
    /// Number of whole-step nodes covered (x = 0 .. (nodes-1) dx).
    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] const Coefficients& at_half(std::size_t j) const noexcept { return table_[j]; }

private:
    Representation rep_;
    double V_;
    double dx_;
    std::size_t nodes_ = 0;
    std::vector<Coefficients> table_;
};

/// (a, b, a', b') at one node.
using State = std::array<double, 4>;

inline State derivative(const CoupledSystem::Coefficients& c, double W, const State& y) noexcept {
    return {y[2], y[3], 2.0 * ((c.pa - W) * y[0] + c.cab * y[1] + c.dab * y[3]),
            2.0 * ((c.pb - W) * y[1] + c.cba * y[0] + c.dba * y[2])};
}

/// Boundary data at x = 0 written as base + s * slope.
struct InitialPair {
    State base;
    State slope;
};

inline InitialPair initial_conditions(Representation rep, Parity parity) {
    if (rep == Representation::diabatic) {
        // even: psi_1 = 1 - s x, psi_2 = 1 + s x; odd: psi_1 = 1 + s x, psi_2 = -1 + s x
        if (parity == Parity::even) return {{1.0, 1.0, 0.0, 0.0}, {0.0, 0.0, -1.0, 1.0}};
        return {{1.0, -1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 1.0}};
    }
    // even: psi_u = 1, psi_d = s x; odd: psi_u = s x, psi_d = 1
    if (parity == Parity::even) return {{1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 1.0}};
    return {{0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}};
}

/// Outward RK4 solutions on x = 0 .. (count-1) dx for the two halves of the
/// linear initial condition. Any slope s gives base + s * slope.
struct BasisSolution {
    std::vector<State> base;
    std::vector<State> slope;
    std::size_t count = 0;
    bool truncated = false;
    double last_valid_x = 0.0;
};

/// Integrate both basis solutions to node n_end (inclusive). Stops early
/// and flags truncation once a component exceeds `limit` times its scale
/// at x = 0.
inline void integrate_basis(const CoupledSystem& sys, double W, std::size_t n_end, const InitialPair& init,
                            BasisSolution& out, double limit = 1e12) {
    if (n_end + 1 > sys.nodes()) throw RangeError("integrate_basis: range exceeds coefficient table");
    out.base.resize(n_end + 1);
    out.slope.resize(n_end + 1);
    out.truncated = false;
    const double h = sys.dx();
    State ya = init.base;
    State yb = init.slope;
    out.base[0] = ya;
    out.slope[0] = yb;
    std::size_t i = 0;
    for (; i < n_end; ++i) {
        const auto& c0 = sys.at_half(2 * i);
        const auto& c1 = sys.at_half(2 * i + 1);
        const auto& c2 = sys.at_half(2 * i + 2);
        auto step = [&](State& y) {
            const State k1 = derivative(c0, W, y);
            State t;
            for (int m = 0; m < 4; ++m) t[m] = y[m] + 0.5 * h * k1[m];
            const State k2 = derivative(c1, W, t);
            for (int m = 0; m < 4; ++m) t[m] = y[m] + 0.5 * h * k2[m];
            const State k3 = derivative(c1, W, t);
            for (int m = 0; m < 4; ++m) t[m] = y[m] + h * k3[m];
            const State k4 = derivative(c2, W, t);
            for (int m = 0; m < 4; ++m) y[m] += h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        };
        step(ya);
        step(yb);
        const double peak = std::max({std::abs(ya[0]), std::abs(ya[1]), std::abs(yb[0]), std::abs(yb[1])});
        if (!(peak < limit)) {
            out.truncated = true;
            break;
        }
        out.base[i + 1] = ya;
        out.slope[i + 1] = yb;
    }
    out.count = i + 1;
    out.last_valid_x = static_cast<double>(i) * h;
}

}  // namespace msac::tidse
