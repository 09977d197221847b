#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/numerics/minimize.hpp"
#include "msac/numerics/quadrature.hpp"
#include "msac/tidse/closed_channel.hpp"
#include "msac/tidse/shooting.hpp"
#include "msac/wave.hpp"

namespace msac::tidse {

struct ResonanceRecord {
    double V = 0.0;
    int nu = 0;
    Parity parity = Parity::even;
    double W = 0.0;
    double s_star = 0.0;
    double tail_amp = 0.0;
    double x_max = 0.0;
    double dx = 0.0;
    Representation representation = Representation::adiabatic;
    double E_closed = 0.0;    ///< closed-channel level the search started from
    double gamma_min = 0.0;   ///< value of the resonance objective at W
};

struct ResonanceOptions {
    ShootingOptions shooting;
    /// Levels with V < W <= V + window. 3.65 gives 9, 12 and 15 levels at
    /// V = 0.306, 1.5275 and 2.75; any value in [3.59, 3.69) does.
    double window = 3.65;
    double points_per_unit = 400.0;    ///< coarse W sampling density
    int densify = 10;                  ///< refinement factor around the coarse minimum
    double search_below = 0.05;        ///< search range relative to the closed level
    double search_above = 0.15;
    int brent_bits = 50;
    double truncation_margin = 0.5;    ///< x_max pull-back after a divergence
};

/// Resonance objective of one shot against one closed-channel level:
///   2 k a^2 / <phi_nu | psi_u>^2
/// with a the allowed-tail amplitude. Projecting on phi_nu removes the
/// smooth closed-channel admixture of the continuum, leaving the inverse
/// Lorentzian Gamma + 4 (W - W_nu)^2 / Gamma, whose minimum is the level.
inline double closed_projection(const Shot& shot, const ClosedLevel& level) {
    const std::size_t n = std::min(shot.n_end, level.psi.size() - 1);
    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double u = shot.y[i][0];
        if (shot.representation == Representation::diabatic) {
            const double th = model::mixing_angle(static_cast<double>(i) * shot.dx, shot.V);
            u = std::cos(th) * shot.y[i][0] + std::sin(th) * shot.y[i][1];
        }
        f[i] = u * level.psi[i];
    }
    return 2.0 * numerics::simpson(f, shot.dx);
}

class ResonanceFinder {
public:
    ResonanceFinder(Representation rep, double V, ResonanceOptions opt = {})
        : opt_(opt), shooter_(rep, V, opt.shooting) {}

    [[nodiscard]] const Shooter& shooter() const noexcept { return shooter_; }
    [[nodiscard]] double V() const noexcept { return shooter_.V(); }

    [[nodiscard]] double objective(const ClosedLevel& level, double W, double x_end) const {
        const Shot shot = shooter_.shoot(level.parity, W, x_end);
        return objective(shot, level);
    }

    [[nodiscard]] double objective(const Shot& shot, const ClosedLevel& level) const {
        const auto d = shooter_.diagnostics(shot);
        const double p = closed_projection(shot, level);
        return 2.0 * d.k * d.amplitude * d.amplitude / (p * p);
    }

    /// Integration range for one level: the x_max schedule at the closed
    /// level energy, pulled inside the divergence point when the outward
    /// solutions overflow first anywhere on [lo, hi]. Kept fixed while that
    /// level is refined.
    [[nodiscard]] double range_for(const ClosedLevel& level, double lo, double hi) const {
        return shooter_.divergence_free_range(level.parity, shooter_.x_end_for(level.E),
                                              std::array<double, 3>{lo, level.E, hi}, opt_.truncation_margin);
    }

    /// Locate the resonance attached to `level` inside [lo, hi]: coarse
    /// sampling, a densified pass around the lowest sample, Brent, and a
    /// final parabolic polish.
    [[nodiscard]] ResonanceRecord refine(const ClosedLevel& level, double lo, double hi) const {
        if (!(hi > lo)) throw BracketError("refine_resonance: empty bracket");
        const double x_end = range_for(level, lo, hi);
        auto h = [&](double W) { return objective(level, W, x_end); };
        const auto coarse = sample(h, lo, hi, opt_.points_per_unit);
        const std::size_t i = lowest_interior(coarse);
        const double step = coarse[1].first - coarse[0].first;
        const auto fine = sample(h, coarse[i - 1].first, coarse[i + 1].first, opt_.points_per_unit * opt_.densify, step);
        const std::size_t j = lowest_interior(fine);
        const auto coarse_min = numerics::brent_minimize(h, fine[j - 1].first, fine[j + 1].first, opt_.brent_bits);
        // Narrow levels need W far below Brent's abscissa tolerance; the
        // objective is quadratic in W, so polish the vertex directly.
        const double floor = 16.0 * std::numeric_limits<double>::epsilon() * coarse_min.x;
        const auto best = numerics::parabolic_polish(h, coarse_min.x, 1e-6 * coarse_min.x, floor);
        const Shot shot = shooter_.shoot(level.parity, best.x, x_end);
        ResonanceRecord r;
        r.V = V();
        r.nu = level.nu;
        r.parity = level.parity;
        r.W = best.x;
        r.s_star = shot.s_star;
        r.tail_amp = shot.tail_amp;
        r.x_max = shot.x_end();
        r.dx = shot.dx;
        r.representation = shooter_.representation();
        r.E_closed = level.E;
        r.gamma_min = best.f;
        return r;
    }

    /// Default search interval around a closed level, clipped halfway to
    /// the neighbouring levels of the same parity.
    [[nodiscard]] std::pair<double, double> search_interval(const std::vector<ClosedLevel>& levels,
                                                            std::size_t k) const {
        double lo = levels[k].E - opt_.search_below;
        double hi = levels[k].E + opt_.search_above;
        if (k >= 2) lo = std::max(lo, 0.5 * (levels[k - 2].E + levels[k].E));
        if (k + 2 < levels.size()) hi = std::min(hi, 0.5 * (levels[k].E + levels[k + 2].E));
        lo = std::max(lo, V() + 1e-6);
        return {lo, hi};
    }

private:
    using Sample = std::pair<double, double>;

    /// Uniform samples of h on [lo, hi]; at least 5 points.
    template <class F>
    [[nodiscard]] static std::vector<Sample> sample(F&& h, double lo, double hi, double density,
                                                    double max_step = std::numeric_limits<double>::infinity()) {
        const double step = std::min(1.0 / density, max_step / 4.0);
        const auto n = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil((hi - lo) / step)));
        std::vector<Sample> out(n + 1);
        for (std::size_t m = 0; m <= n; ++m) {
            const double W = lo + (hi - lo) * static_cast<double>(m) / static_cast<double>(n);
            out[m] = {W, h(W)};
        }
        return out;
    }

    [[nodiscard]] static std::size_t lowest_interior(const std::vector<Sample>& s) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < s.size(); ++m)
            if (s[m].second < s[best].second) best = m;
        if (best == 0 || best + 1 == s.size()) {
            throw BracketError("refine_resonance: objective minimum on the bracket edge");
        }
        return best;
    }

    ResonanceOptions opt_;
    Shooter shooter_;
};

/// Closed-channel levels that seed the search: all levels below the
/// window top plus a margin for the upward level shift.
inline std::vector<ClosedLevel> seed_levels(double V, const ResonanceOptions& opt,
                                            const ClosedChannelOptions& copt = {}) {
    ClosedChannelOptions c = copt;
    c.dx = opt.shooting.dx;
    const ClosedChannel cc(V, V + opt.window + opt.search_above + 0.25, c);
    return cc.levels();
}

/// All resonances with V < W_nu <= V + window, ordered by nu. Parities
/// alternate by construction of the seeds; a refined level that falls out
/// of order signals a bracketing failure.
inline std::vector<ResonanceRecord> scan_resonances(double V, Representation rep, const ResonanceOptions& opt = {}) {
    const ResonanceFinder finder(rep, V, opt);
    const auto levels = seed_levels(V, opt);
    std::vector<ResonanceRecord> out;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k].E - opt.search_above > V + opt.window) break;
        const auto [lo, hi] = finder.search_interval(levels, k);
        ResonanceRecord r = finder.refine(levels[k], lo, hi);
        if (!out.empty() && !(r.W > out.back().W)) {
            throw BracketError("scan_resonances: resonance order broken between nu and nu-1");
        }
        if (r.W <= V + opt.window) out.push_back(r);
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (out[k].nu != static_cast<int>(k)) throw BracketError("scan_resonances: missing resonance in the sequence");
    }
    return out;
}

}  // namespace msac::tidse
