#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/grid.hpp"
#include "msac/numerics/minimize.hpp"
#include "msac/numerics/quadrature.hpp"
#include "msac/stationary/bounds.hpp"
#include "msac/tidse/system.hpp"
#include "msac/wave.hpp"

namespace msac::tidse {

struct ShootingOptions {
    double dx = 1e-3;
    XmaxSchedule x_max;
    double divergence_limit = 1e12;
    /// Allowed-tail amplitudes are read this far inside x_max, away from
    /// the residue of the growing forbidden solution.
    double reference_offset = 1.0;
    double r_k = 3.0;
};

struct ShootingProblem {
    Representation representation = Representation::adiabatic;
    Parity parity = Parity::even;
    double V = 1.0;
    double W = 1.5;
    model::Grid grid{13.0, 1e-3};
};

/// Converged outward solution for one (representation, parity, V, W).
struct Shot {
    Representation representation = Representation::adiabatic;
    Parity parity = Parity::even;
    double V = 0.0;
    double W = 0.0;
    double dx = 0.0;
    double s_star = 0.0;
    double tail_amp = 0.0;  ///< forbidden-component amplitude over the last local wavelength
    std::size_t n_end = 0;
    std::vector<State> y;  ///< x = 0 .. n_end * dx

    [[nodiscard]] double x_end() const noexcept { return static_cast<double>(n_end) * dx; }
};

/// Tail and norm measures of one shot.
///
/// resonance_objective = 2 k a^2 / N_u uses the allowed tail amplitude a at
/// x_ref and the closed-channel (upper adiabatic) norm N_u inside +-x_k.
/// Off resonance N_u falls like 1/detuning^2, so near an isolated level the
/// objective is the parabola Gamma + 4 (W - W_nu)^2 / Gamma and never
/// saturates, which keeps very narrow levels visible on a coarse W grid.
struct TailDiagnostics {
    double x_ref = 0.0;
    double k = 0.0;
    double amplitude = 0.0;
    double x_k = 0.0;
    double P0 = 0.0;
    double closed_norm = 0.0;
    double decay_proxy = 0.0;  ///< 2 k a^2 / P0
    double resonance_objective = 0.0;
};

class Shooter {
public:
    Shooter(Representation rep, double V, ShootingOptions opt = {})
        : opt_(opt), sys_(rep, V, opt.dx, opt.x_max.upper_bound() + opt.dx) {}

    [[nodiscard]] Representation representation() const noexcept { return sys_.representation(); }
    [[nodiscard]] double V() const noexcept { return sys_.V(); }
    [[nodiscard]] const ShootingOptions& options() const noexcept { return opt_; }

    [[nodiscard]] double x_end_for(double W) const { return opt_.x_max(V(), W); }

    /// Raw basis integration to x_end (no slope selection).
    [[nodiscard]] BasisSolution basis(Parity parity, double W, double x_end) const {
        BasisSolution b;
        integrate_basis(sys_, W, node_count(x_end), initial_conditions(representation(), parity), b,
                        opt_.divergence_limit);
        if (b.truncated) {
            throw TruncationError("outward integration diverged before x_max", b.last_valid_x);
        }
        return b;
    }

    [[nodiscard]] Shot shoot(Parity parity, double W) const { return shoot(parity, W, x_end_for(W)); }

    /// Largest range <= x_end on which the outward solutions stay below the
    /// divergence guard at every probe energy; each overflow pulls the range
    /// back to `margin` inside the last valid point.
    template <class Energies>
    [[nodiscard]] double divergence_free_range(Parity parity, double x_end, const Energies& probes,
                                               double margin = 0.5, int attempts = 8) const {
        for (int a = 0; a < attempts; ++a) {
            try {
                for (double W : probes) (void)basis(parity, W, x_end);
                return x_end;
            } catch (const TruncationError& e) {
                x_end = e.last_valid_x() - margin;
            }
        }
        throw TruncationError("no divergence-free integration range", x_end);
    }

    /// Select the slope s that minimises the forbidden component over the
    /// last local wavelength before x_end (bracket expansion + golden section).
    [[nodiscard]] Shot shoot(Parity parity, double W, double x_end) const {
        const BasisSolution b = basis(parity, W, x_end);
        const std::size_t n_end = b.count - 1;
        const std::size_t cf = forbidden_component(representation());
        const double xe = static_cast<double>(n_end) * opt_.dx;
        const double k_end = allowed_wave_number(representation(), V(), W, xe);
        const auto span = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / k_end / opt_.dx));
        const std::size_t first = n_end > span ? n_end - span : 0;
        const double inv_count = 1.0 / static_cast<double>(n_end - first + 1);

        auto objective = [&](double s) {
            double acc = 0.0;
            for (std::size_t i = first; i <= n_end; ++i) {
                const double v = b.base[i][cf] + s * b.slope[i][cf];
                acc += v * v;
            }
            return std::sqrt(2.0 * acc * inv_count);
        };
        const auto br = numerics::expand_bracket(objective, -1.0, 1.0);
        const auto best = numerics::golden_section(objective, br, 0.0);

        Shot shot;
        shot.representation = representation();
        shot.parity = parity;
        shot.V = V();
        shot.W = W;
        shot.dx = opt_.dx;
        shot.s_star = best.x;
        shot.tail_amp = best.f;
        shot.n_end = n_end;
        shot.y.resize(n_end + 1);
        for (std::size_t i = 0; i <= n_end; ++i)
            for (int m = 0; m < 4; ++m) shot.y[i][m] = b.base[i][m] + best.x * b.slope[i][m];
        return shot;
    }

    [[nodiscard]] TailDiagnostics diagnostics(const Shot& shot) const {
        TailDiagnostics d;
        const std::size_t ca = allowed_component(shot.representation);
        const auto off = static_cast<std::size_t>(std::llround(opt_.reference_offset / shot.dx));
        if (off >= shot.n_end) throw RangeError("diagnostics: reference point outside the solution");
        const std::size_t r = shot.n_end - off;
        d.x_ref = static_cast<double>(r) * shot.dx;
        d.k = allowed_wave_number(shot.representation, shot.V, shot.W, d.x_ref);
        const double dk = -allowed_potential_slope(shot.representation, shot.V, d.x_ref) / d.k;
        d.amplitude = wkb_amplitude(shot.y[r][ca], shot.y[r][2 + ca], d.k, dk);
        d.x_k = std::min(stationary::norm_boundary(shot.V, shot.W, opt_.r_k), d.x_ref);
        d.P0 = half_line_norm(shot, d.x_k);
        d.closed_norm = closed_channel_norm(shot, d.x_k);
        const double flux = 2.0 * d.k * d.amplitude * d.amplitude;
        d.decay_proxy = flux / d.P0;
        d.resonance_objective = flux / d.closed_norm;
        return d;
    }

    /// Norm of the upper adiabatic component over [-x, x].
    [[nodiscard]] static double closed_channel_norm(const Shot& shot, double x) {
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::llround(x / shot.dx)), shot.n_end);
        std::vector<double> dens(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            double u = shot.y[i][0];
            if (shot.representation == Representation::diabatic) {
                const double th = model::mixing_angle(static_cast<double>(i) * shot.dx, shot.V);
                u = std::cos(th) * shot.y[i][0] + std::sin(th) * shot.y[i][1];
            }
            dens[i] = u * u;
        }
        return 2.0 * numerics::simpson(dens, shot.dx);
    }

    /// 2 int_0^{x} (a^2 + b^2) dx, i.e. the norm over [-x, x].
    [[nodiscard]] static double half_line_norm(const Shot& shot, double x) {
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::llround(x / shot.dx)), shot.n_end);
        std::vector<double> dens(n + 1);
        for (std::size_t i = 0; i <= n; ++i) dens[i] = shot.y[i][0] * shot.y[i][0] + shot.y[i][1] * shot.y[i][1];
        return 2.0 * numerics::simpson(dens, shot.dx);
    }

    /// Full symmetric wave on [-x_end, x_end] from the half-line solution.
    [[nodiscard]] static RealWave wave(const Shot& shot) {
        RealWave w;
        w.grid = model::Grid(shot.x_end(), shot.dx);
        w.representation = shot.representation;
        w.parity = shot.parity;
        w.V = shot.V;
        w.W = shot.W;
        const std::size_t n = shot.n_end;
        const std::size_t size = 2 * n + 1;
        for (std::size_t c = 0; c < 2; ++c) {
            w.psi[c].assign(size, 0.0);
            w.dpsi[c].assign(size, 0.0);
        }
        const double sigma = shot.parity == Parity::even ? 1.0 : -1.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const State& y = shot.y[i];
            const std::size_t pos = n + i;
            const std::size_t neg = n - i;
            for (std::size_t c = 0; c < 2; ++c) {
                w.psi[c][pos] = y[c];
                w.dpsi[c][pos] = y[2 + c];
            }
            if (shot.representation == Representation::diabatic) {
                // psi_2(-x) = sigma psi_1(x), psi_1(-x) = sigma psi_2(x)
                w.psi[0][neg] = sigma * y[1];
                w.psi[1][neg] = sigma * y[0];
                w.dpsi[0][neg] = -sigma * y[3];
                w.dpsi[1][neg] = -sigma * y[2];
            } else {
                // even: psi_u even, psi_d odd; odd: the reverse
                const double su = sigma;
                const double sd = -sigma;
                w.psi[0][neg] = su * y[0];
                w.psi[1][neg] = sd * y[1];
                w.dpsi[0][neg] = -su * y[2];
                w.dpsi[1][neg] = -sd * y[3];
            }
        }
        return w;
    }

private:
    [[nodiscard]] std::size_t node_count(double x_end) const {
        const auto n = static_cast<std::size_t>(std::llround(x_end / opt_.dx));
        if (n + 1 > sys_.nodes()) throw RangeError("Shooter: x_end beyond the configured range");
        return n;
    }

    ShootingOptions opt_;
    CoupledSystem sys_;
};

/// Outward integration for one fixed slope s over the problem's grid.
inline RealWave integrate(const ShootingProblem& problem, double s) {
    ShootingOptions opt;
    opt.dx = problem.grid.dx();
    opt.x_max.fixed = problem.grid.x_max();
    const Shooter shooter(problem.representation, problem.V, opt);
    const BasisSolution b = shooter.basis(problem.parity, problem.W, problem.grid.x_max());
    Shot shot;
    shot.representation = problem.representation;
    shot.parity = problem.parity;
    shot.V = problem.V;
    shot.W = problem.W;
    shot.dx = opt.dx;
    shot.s_star = s;
    shot.n_end = b.count - 1;
    shot.y.resize(b.count);
    for (std::size_t i = 0; i < b.count; ++i)
        for (int m = 0; m < 4; ++m) shot.y[i][m] = b.base[i][m] + s * b.slope[i][m];
    return Shooter::wave(shot);
}

struct SlopeSolution {
    double s_star = 0.0;
    double tail_amp = 0.0;
    RealWave wave;
};

inline SlopeSolution solve_slope(const ShootingProblem& problem) {
    ShootingOptions opt;
    opt.dx = problem.grid.dx();
    opt.x_max.fixed = problem.grid.x_max();
    const Shooter shooter(problem.representation, problem.V, opt);
    const Shot shot = shooter.shoot(problem.parity, problem.W, problem.grid.x_max());
    return {shot.s_star, shot.tail_amp, Shooter::wave(shot)};
}

}  // namespace msac::tidse
