#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/numerics/quadrature.hpp"
#include "msac/tidse/closed_channel.hpp"
#include "msac/tidse/scalar.hpp"
#include "msac/tidse/system.hpp"
#include "msac/wave.hpp"

namespace msac::approx {

/// Energy-normalised scattering state of -1/2 d2 + V~_d on x >= 0 with a
/// definite parity, so that on the full line <psi_W'|psi_W> = delta(W - W').
struct ContinuumState {
    double V = 0.0;
    double W = 0.0;
    Parity parity = Parity::even;
    double dx = 0.0;
    std::vector<double> psi;
    std::vector<double> dpsi;
    double amplitude_spread = 0.0;  ///< relative spread of the matched WKB amplitude
};

inline double lower_potential_tilde(double x, double V) { return model::adiabatic_point(x, V).Vt_d; }

/// Local wave number on V~_d.
inline double lower_wave_number(double x, double V, double W) {
    return std::sqrt(2.0 * (W - lower_potential_tilde(x, V)));
}

/// Asymptotic energy-normalised amplitude (1/sqrt(pi)) (x + 2W)^(-1/4).
inline double asymptotic_amplitude(double x, double W) {
    return 1.0 / std::sqrt(std::numbers::pi) * std::pow(x + 2.0 * W, -0.25);
}

/// Outward RK4 on V~_d from the parity condition at x = 0, scaled so that
/// the WKB invariant a(x) sqrt(k(x)) equals 1/sqrt(pi) on the last
/// `match_width` units. This is the local-k form of the asymptotic
/// normalisation and tends to it as x grows.
inline ContinuumState fgr_continuum_state(double V, double W, Parity parity, double dx, double x_end,
                                          double match_width = 2.0, double spread_tol = 1e-2) {
    if (!(x_end > match_width)) throw RangeError("fgr_continuum_state: range shorter than the matching window");
    const tidse::ScalarSystem sys([V](double x) { return lower_potential_tilde(x, V); }, dx, x_end + dx);
    const auto n = static_cast<std::size_t>(std::llround(x_end / dx));
    const auto y = sys.integrate(W, parity, n);
    const auto first = static_cast<std::size_t>(std::llround((x_end - match_width) / dx));
    double sum = 0.0, lo = 1e300, hi = 0.0;
    std::size_t count = 0;
    for (std::size_t i = first; i <= n; ++i) {
        const double x = static_cast<double>(i) * dx;
        const double k = lower_wave_number(x, V, W);
        const double h = 1e-4;
        const double dk = (lower_wave_number(x + h, V, W) - lower_wave_number(x - h, V, W)) / (2.0 * h);
        const double inv = tidse::wkb_amplitude(y[i][0], y[i][1], k, dk) * std::sqrt(k);
        sum += inv;
        lo = std::min(lo, inv);
        hi = std::max(hi, inv);
        ++count;
    }
    const double mean = sum / static_cast<double>(count);
    if (!(mean > 0.0)) throw RangeError("fgr_continuum_state: vanishing tail amplitude");
    ContinuumState c;
    c.V = V;
    c.W = W;
    c.parity = parity;
    c.dx = dx;
    c.amplitude_spread = (hi - lo) / mean;
    if (c.amplitude_spread > spread_tol) throw RangeError("fgr_continuum_state: matching region not asymptotic");
    const double scale = 1.0 / (std::sqrt(std::numbers::pi) * mean);
    c.psi.resize(n + 1);
    c.dpsi.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        c.psi[i] = scale * y[i][0];
        c.dpsi[i] = scale * y[i][1];
    }
    return c;
}

/// Matrix-element densities on the full symmetric grid [-x_end, x_end].
struct FgrDensities {
    double dx = 0.0;
    std::vector<double> x;
    std::vector<double> m_A;
    std::vector<double> m_B;
    std::vector<double> m_Sigma;
    std::vector<double> M_cum;  ///< running integral of m_Sigma from the left end
};

struct FgrResult {
    double V = 0.0;
    int nu = 0;
    double W_fgr = 0.0;
    double M = 0.0;
    double gamma = 0.0;
    double tau = 0.0;
    double dx = 0.0;            ///< step of the accepted refinement level
    int refinements = 0;
    double last_change = 0.0;   ///< relative change of M at the last halving
    FgrDensities densities;
};

/// M = int psi_d [B_du + A_du d/dx] psi_u dx for a bound level and a
/// continuum state sharing the step; densities on x >= 0 are mirrored
/// (m_Sigma is even for opposite parities and odd otherwise).
inline double matrix_element(const tidse::ClosedLevel& bound, const ContinuumState& cont, FgrDensities* dens) {
    if (bound.dx != cont.dx) throw DomainError("matrix_element: bound and continuum steps differ");
    const std::size_t n = std::min(bound.psi.size(), cont.psi.size()) - 1;
    std::vector<double> mA(n + 1), mB(n + 1), mS(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const auto p = model::adiabatic_point(static_cast<double>(i) * bound.dx, bound.V);
        mA[i] = cont.psi[i] * p.A_du * bound.dpsi[i];
        mB[i] = cont.psi[i] * p.B_du * bound.psi[i];
        mS[i] = mA[i] + mB[i];
    }
    // m_Sigma(-x) = s m_Sigma(x) with s = +1 for opposite parities.
    const double s = bound.parity != cont.parity ? 1.0 : -1.0;
    const double half = numerics::simpson(mS, bound.dx);
    const double M = (1.0 + s) * half;
    if (dens) {
        const std::size_t m = 2 * n + 1;
        dens->dx = bound.dx;
        dens->x.resize(m);
        dens->m_A.resize(m);
        dens->m_B.resize(m);
        dens->m_Sigma.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t i = j >= n ? j - n : n - j;
            const double sign = j >= n ? 1.0 : s;
            dens->x[j] = (static_cast<double>(j) - static_cast<double>(n)) * bound.dx;
            dens->m_A[j] = sign * mA[i];
            dens->m_B[j] = sign * mB[i];
            dens->m_Sigma[j] = sign * mS[i];
        }
        dens->M_cum = numerics::cumulative_simpson(dens->m_Sigma, bound.dx);
    }
    return M;
}

struct FgrOptions {
    double dx = 1e-3;
    double window = 3.8;          ///< levels are searched below V + window + margin
    double tail_exponent = 20.0;  ///< range of the bound state past the turning point
    double tolerance = 5e-3;      ///< relative change of M accepted between halvings
    int max_halvings = 7;         ///< up to dx / 128
    double match_width = 2.0;
    bool densities = true;
};

/// Single refinement level: bound state, continuum of opposite parity at the
/// bound energy, and M.
inline FgrResult fgr_at_step(double V, int nu, double dx, const FgrOptions& opt, double E_guess = 0.0) {
    tidse::ClosedChannelOptions copt;
    copt.dx = dx;
    copt.tail_exponent = opt.tail_exponent;
    const tidse::ClosedChannel cc(V, V + opt.window + 0.5, copt);
    const tidse::ClosedLevel bound = E_guess > 0.0 ? cc.level(nu, E_guess - 1e-4, E_guess + 1e-4) : cc.level(nu);
    const auto cont = fgr_continuum_state(V, bound.E, opposite(bound.parity), dx, cc.x_end(), opt.match_width);
    FgrResult r;
    r.V = V;
    r.nu = nu;
    r.W_fgr = bound.E;
    r.dx = dx;
    r.M = matrix_element(bound, cont, opt.densities ? &r.densities : nullptr);
    r.gamma = 2.0 * std::numbers::pi * r.M * r.M;
    r.tau = 1.0 / r.gamma;
    return r;
}

/// FGR lifetime with step halving until M is stable to `tolerance`.
inline FgrResult fgr_lifetime(double V, int nu, const FgrOptions& opt = {}) {
    FgrResult prev = fgr_at_step(V, nu, opt.dx, opt);
    for (int k = 1; k <= opt.max_halvings; ++k) {
        FgrResult next = fgr_at_step(V, nu, prev.dx / 2.0, opt, prev.W_fgr);
        next.refinements = k;
        next.last_change = std::abs(next.M - prev.M) / std::abs(next.M);
        if (next.last_change < opt.tolerance) return next;
        prev = std::move(next);
    }
    throw ConvergenceError("fgr_lifetime: matrix element not stable under step refinement (last change " +
                           std::to_string(prev.last_change) + ")");
}

}  // namespace msac::approx
