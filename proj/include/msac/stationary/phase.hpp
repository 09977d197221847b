#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/numerics/quadrature.hpp"
#include "msac/wave.hpp"

namespace msac::stationary {

/// Scattering phase phi(W) of the allowed tail at x_B, branch-tracked in
/// W, and the background phase phi0(W) = int_0^{x_B} sqrt(2 (W - V_*)) dx.
struct PhaseCurve {
    Representation representation = Representation::adiabatic;
    Parity parity = Parity::even;
    double V = 0.0;
    double x_B = 0.0;
    std::vector<double> W;
    std::vector<double> phi;
    std::vector<double> phi0;

    [[nodiscard]] std::size_t size() const noexcept { return W.size(); }
    [[nodiscard]] double relative(std::size_t i) const { return phi[i] - phi0[i]; }
};

/// Potential V_* of the open channel used for the background phase:
/// -x/2 (diabatic) or V_d(x) (adiabatic).
inline double background_potential(Representation rep, double V, double x) {
    return rep == Representation::diabatic ? -0.5 * x : -model::upper_potential(x, V);
}

inline double background_phase(Representation rep, double V, double W, double x_B, double dx = 1e-3) {
    const auto n = static_cast<std::size_t>(std::ceil(x_B / dx));
    const double h = x_B / static_cast<double>(n);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = h * static_cast<double>(i);
        const double kin = 2.0 * (W - background_potential(rep, V, x));
        if (!(kin > 0.0)) throw RangeError("background_phase: open channel closed inside x_B");
        f[i] = std::sqrt(kin);
    }
    return numerics::simpson(f, h);
}

/// Local phase S of psi = a cos S from value and slope, modulo pi:
/// tan S = -(psi' + (k'/2k) psi) / (k psi).
inline double local_phase(double psi, double dpsi, double k, double dk) {
    return std::atan(-(dpsi + 0.5 * dk / k * psi) / (k * psi));
}

/// Tail sample (psi, psi', k, k') of the allowed component at x_B for one W.
struct TailSample {
    double psi = 0.0;
    double dpsi = 0.0;
    double k = 0.0;
    double dk = 0.0;
};

/// Build a phase curve from a sampler W -> tail data at x_B. Each sample
/// takes the branch m pi closest to the previous phase advanced by the
/// background slope; a remaining jump above `max_jump` means the W grid is
/// too coarse to track the branch. Resolved grids (10 samples per width)
/// move the phase by at most ~0.2 rad per sample.
inline PhaseCurve phase_curve(Representation rep, Parity parity, double V, const std::vector<double>& W_grid,
                              double x_B, const std::function<TailSample(double)>& sampler,
                              double max_jump = 0.25 * std::numbers::pi) {
    PhaseCurve c;
    c.representation = rep;
    c.parity = parity;
    c.V = V;
    c.x_B = x_B;
    c.W = W_grid;
    c.phi.resize(W_grid.size());
    c.phi0.resize(W_grid.size());
    for (std::size_t i = 0; i < W_grid.size(); ++i) {
        if (i > 0 && !(W_grid[i] > W_grid[i - 1])) throw DomainError("phase_curve: W grid must increase");
        const TailSample t = sampler(W_grid[i]);
        double phi = local_phase(t.psi, t.dpsi, t.k, t.dk);
        c.phi0[i] = background_phase(rep, V, W_grid[i], x_B);
        if (i > 0) {
            // Predict from the background slope, then pick the nearest branch.
            const double pred = c.phi[i - 1] + (c.phi0[i] - c.phi0[i - 1]);
            const double m = std::round((pred - phi) / std::numbers::pi);
            phi += m * std::numbers::pi;
            if (std::abs(phi - pred) > max_jump) {
                throw ResolutionError("phase_curve: phase jump between adjacent W samples is ambiguous");
            }
        }
        c.phi[i] = phi;
    }
    return c;
}

struct BreitWignerResult {
    double tau = 0.0;
    double gamma = 0.0;
    double peak_slope = 0.0;        ///< d(phi - phi0)/dW at W_nu
    double background_slope = 0.0;  ///< slope left after removing the Lorentzian shape
    bool background_flag = false;   ///< background above 10% of the peak slope
};

/// tau_BW = (1/2) d(phi - phi0)/dW at W_nu by a centred five-point stencil.
/// The curve must hold W_nu and an equally spaced stencil around it.
inline BreitWignerResult lifetime_bw(const PhaseCurve& c, double W_nu) {
    const std::size_t n = c.size();
    if (n < 5) throw ResolutionError("lifetime_bw: phase curve too short");
    std::size_t i = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (std::abs(c.W[j] - W_nu) < std::abs(c.W[i] - W_nu)) i = j;
    if (i < 2 || i + 2 >= n) throw ResolutionError("lifetime_bw: W_nu too close to the curve edge");
    const double h = c.W[i + 1] - c.W[i];
    for (std::size_t j = i - 2; j < i + 2; ++j) {
        // Loose on purpose: for very narrow levels h is a few thousand ulps of W.
        if (std::abs((c.W[j + 1] - c.W[j]) - h) > 1e-2 * h) {
            throw ResolutionError("lifetime_bw: stencil around W_nu is not uniform");
        }
    }
    auto slope_at = [&](std::size_t j) {
        return (c.relative(j - 2) - 8.0 * c.relative(j - 1) + 8.0 * c.relative(j + 1) - c.relative(j + 2)) /
               (12.0 * h);
    };
    BreitWignerResult r;
    r.peak_slope = slope_at(i);
    if (!(r.peak_slope > 0.0)) throw ResolutionError("lifetime_bw: phase does not rise at W_nu");
    r.tau = 0.5 * r.peak_slope;
    r.gamma = 1.0 / r.tau;
    // A Lorentzian step has slope peak/(1 + (2 d/Gamma)^2) at detuning d;
    // compare with the curve at d = +-Gamma where it should be peak/5.
    const double d = r.gamma;
    double far = 0.0;
    int used = 0;
    for (double sign : {-1.0, 1.0}) {
        const double target = c.W[i] + sign * d;
        std::size_t j = i;
        for (std::size_t m = 2; m + 2 < n; ++m)
            if (std::abs(c.W[m] - target) < std::abs(c.W[j] - target)) j = m;
        if (j == i || j < 2 || j + 2 >= n || std::abs(c.W[j] - target) > 0.25 * d) continue;
        const double hh = c.W[j + 1] - c.W[j];
        const double s = (c.relative(j - 2) - 8.0 * c.relative(j - 1) + 8.0 * c.relative(j + 1) -
                          c.relative(j + 2)) / (12.0 * hh);
        const double dd = (c.W[j] - c.W[i]) / r.gamma * 2.0;
        far += s - r.peak_slope / (1.0 + dd * dd);
        ++used;
    }
    if (used > 0) r.background_slope = far / used;
    r.background_flag = std::abs(r.background_slope) > 0.1 * r.peak_slope;
    return r;
}

}  // namespace msac::stationary
