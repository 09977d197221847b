#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "msac/error.hpp"
#include "msac/tdse/absorber.hpp"
#include "msac/tdse/crank_nicolson.hpp"
#include "msac/wave.hpp"

namespace msac::tdse {

/// Zero each component beyond its outermost node on both sides and
/// renormalise. The sample nearest the crossing is set to zero as well, so
/// the result is continuous and vanishes at the Dirichlet ends.
template <class T>
ComplexWave prepare_initial_state(const TwoComponentWave<T>& wave) {
    ComplexWave out = to_complex(wave);
    out.dpsi = {};
    const std::size_t n = out.size();
    const std::size_t mid = out.grid.center();
    for (std::size_t c = 0; c < 2; ++c) {
        auto& p = out.psi[c];
        auto sign_change = [&](std::size_t i, std::size_t j) {
            return std::real(p[i]) * std::real(p[j]) <= 0.0 && std::real(p[i]) != std::real(p[j]);
        };
        // Right side: last crossing between i and i+1.
        std::optional<std::size_t> right;
        for (std::size_t i = n - 1; i-- > mid;)
            if (sign_change(i, i + 1)) {
                right = std::abs(p[i]) <= std::abs(p[i + 1]) ? i : i + 1;
                break;
            }
        std::optional<std::size_t> left;
        for (std::size_t i = 0; i + 1 <= mid; ++i)
            if (sign_change(i, i + 1)) {
                left = std::abs(p[i]) <= std::abs(p[i + 1]) ? i : i + 1;
                break;
            }
        if (!right || !left) throw PropagationError("prepare_initial_state: component without an outer node");
        for (std::size_t i = *right; i < n; ++i) p[i] = 0.0;
        for (std::size_t i = 0; i <= *left; ++i) p[i] = 0.0;
    }
    const double nrm = out.norm();
    if (!(nrm > 0.0)) throw PropagationError("prepare_initial_state: empty state");
    out.scale(1.0 / std::sqrt(nrm));
    return out;
}

/// The same state on a wider grid with the same step, zero outside the
/// original range.
inline ComplexWave pad_grid(const ComplexWave& in, double x_max) {
    if (x_max <= in.grid.x_max()) return in;
    ComplexWave out = in;
    out.grid = model::Grid(x_max, in.grid.dx());
    out.dpsi = {};
    const std::size_t shift = out.grid.center() - in.grid.center();
    for (std::size_t c = 0; c < 2; ++c) {
        out.psi[c].assign(out.grid.size(), cplx{});
        std::copy(in.psi[c].begin(), in.psi[c].end(), out.psi[c].begin() + static_cast<std::ptrdiff_t>(shift));
    }
    return out;
}

struct NormTrace {
    std::vector<double> t;
    std::vector<double> P;
    /// Largest relative mismatch between the recorded norm loss over one
    /// step and 2 dt int eta |psi_mid|^2.
    double loss_mismatch = 0.0;
    double fit_start = 0.0;
    double fit_end = 0.0;
    double gamma = 0.0;
    double tau = 0.0;
    double residual = 0.0;
    bool reflection_warning = false;
};

struct PropagationOptions {
    double dt = 1e-3;
    double T_end = 1000.0;
    std::size_t record_every = 100;  ///< steps between norm records
    double stop_norm = 0.1;          ///< stop once P falls below this
    double growth_tol = 1e-9;        ///< allowed norm increase per record
    bool check_loss = true;          ///< evaluate the absorbed-flux identity at records
};

/// Propagate under H - W (energy offset at the state's W) with the absorber,
/// recording P(t) every record_every steps.
inline NormTrace propagate(const ComplexWave& state, const Absorber& absorber, const PropagationOptions& opt = {},
                           bool coupled = true) {
    if (!(opt.T_end > 0.0) || opt.record_every == 0) throw DomainError("propagate: bad time settings");
    const ComplexWave padded = pad_grid(state, absorber.x_max);
    const auto& g = padded.grid;
    std::vector<double> eta(g.size());
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = absorber.eta(g.x(i));
    CrankNicolson cn(make_hamiltonian(padded.representation, padded.V, g, padded.W, coupled), eta, opt.dt);
    auto psi = to_pairs(padded);
    const double dx = g.dx();
    NormTrace tr;
    double P = norm(psi, dx);
    tr.t.push_back(0.0);
    tr.P.push_back(P);
    const auto steps = static_cast<std::size_t>(std::ceil(opt.T_end / opt.dt - 1e-9));
    std::vector<Pair> before;
    for (std::size_t s = 1; s <= steps; ++s) {
        const bool record = s % opt.record_every == 0 || s == steps;
        if (record && opt.check_loss) before = psi;
        cn.step(psi);
        if (!record) continue;
        const double Pn = norm(psi, dx);
        if (!std::isfinite(Pn) || Pn > P * (1.0 + opt.growth_tol)) {
            throw PropagationError("propagate: norm increased, propagation unstable");
        }
        if (opt.check_loss) {
            const double Pb = norm(before, dx);
            for (std::size_t i = 0; i < psi.size(); ++i) {
                before[i].u = 0.5 * (before[i].u + psi[i].u);
                before[i].v = 0.5 * (before[i].v + psi[i].v);
            }
            const double predicted = opt.dt * absorption_rate(before, eta, dx);
            const double actual = Pb - Pn;
            if (predicted > 1e-12 * Pb) {
                tr.loss_mismatch = std::max(tr.loss_mismatch, std::abs(actual - predicted) / predicted);
            }
        }
        P = Pn;
        tr.t.push_back(static_cast<double>(s) * opt.dt);
        tr.P.push_back(P);
        if (P < opt.stop_norm) break;
    }
    return tr;
}

struct FitOptions {
    double P_start = 0.99;
    double P_end = 0.1;
    double max_residual = 1e-3;  ///< RMS of the ln P residual
    /// Relative slope difference between the window halves above which a
    /// reflection warning is raised.
    double reflection_tol = 0.05;
};

/// Least-squares line through ln P(t) on the window where
/// P_end <= P <= P_start; tau = -1/slope.
inline void lifetime_from_norm(NormTrace& tr, const FitOptions& opt = {}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tr.P.size(); ++i)
        if (tr.P[i] <= opt.P_start && tr.P[i] >= opt.P_end) idx.push_back(i);
    if (idx.size() < 3) throw PropagationError("lifetime_from_norm: fewer than three samples in the fit window");
    auto fit = [&](std::size_t b, std::size_t e, double* res) {
        double st = 0, sy = 0, stt = 0, sty = 0;
        const double m = static_cast<double>(e - b);
        for (std::size_t k = b; k < e; ++k) {
            const double t = tr.t[idx[k]], y = std::log(tr.P[idx[k]]);
            st += t;
            sy += y;
            stt += t * t;
            sty += t * y;
        }
        const double slope = (m * sty - st * sy) / (m * stt - st * st);
        const double icpt = (sy - slope * st) / m;
        if (res) {
            double ss = 0.0;
            for (std::size_t k = b; k < e; ++k) {
                const double r = std::log(tr.P[idx[k]]) - (icpt + slope * tr.t[idx[k]]);
                ss += r * r;
            }
            *res = std::sqrt(ss / m);
        }
        return slope;
    };
    double res = 0.0;
    const double slope = fit(0, idx.size(), &res);
    if (!(slope < 0.0)) throw PropagationError("lifetime_from_norm: norm does not decay");
    tr.fit_start = tr.t[idx.front()];
    tr.fit_end = tr.t[idx.back()];
    tr.gamma = -slope;
    tr.tau = 1.0 / tr.gamma;
    tr.residual = res;
    if (idx.size() >= 6) {
        const double s1 = fit(0, idx.size() / 2, nullptr);
        const double s2 = fit(idx.size() / 2, idx.size(), nullptr);
        tr.reflection_warning = std::abs(s1 - s2) > opt.reflection_tol * std::abs(slope);
    }
    if (res > opt.max_residual) throw PropagationError("lifetime_from_norm: decay is not exponential");
}

}  // namespace msac::tdse
