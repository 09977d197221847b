#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "msac/error.hpp"
#include "msac/stationary/flux.hpp"
#include "msac/stationary/phase.hpp"
#include "msac/tidse/resonance.hpp"
#include "msac/tidse/shooting.hpp"

namespace msac::stationary {

/// Stationary resonance wave on [-x_max, x_max] at the record's W and range.
inline RealWave resonance_wave(const tidse::Shooter& shooter, const tidse::ResonanceRecord& r) {
    return tidse::Shooter::wave(shooter.shoot(r.parity, r.W, r.x_max));
}

inline FluxResult flux_lifetime(const tidse::Shooter& shooter, const tidse::ResonanceRecord& r,
                                const FluxOptions& opt = {}) {
    return lifetime_flux(resonance_wave(shooter, r), opt);
}

struct BreitWignerOptions {
    /// x_B = x_max - offset.
    double x_B_offset = 1.0;
    /// Samples per width estimate and half-span of the W grid in widths.
    int samples_per_width = 10;
    double half_span_widths = 2.0;
};

/// Allowed-tail data at x for one energy, integrating to a fixed range.
inline TailSample tail_sample(const tidse::Shooter& shooter, Parity parity, double W, double x_end, double x) {
    const tidse::Shot shot = shooter.shoot(parity, W, x_end);
    const auto i = static_cast<std::size_t>(std::llround(x / shot.dx));
    if (i >= shot.n_end) throw RangeError("tail_sample: x_B beyond the integration range");
    const std::size_t c = allowed_component(shot.representation);
    TailSample t;
    t.psi = shot.y[i][c];
    t.dpsi = shot.y[i][2 + c];
    const double xi = static_cast<double>(i) * shot.dx;
    t.k = tidse::allowed_wave_number(shot.representation, shot.V, W, xi);
    t.dk = -tidse::allowed_potential_slope(shot.representation, shot.V, xi) / t.k;
    return t;
}

/// Phase curve sampled uniformly over [W_lo, W_hi] (n + 1 points).
inline PhaseCurve sampled_phase_curve(const tidse::Shooter& shooter, Parity parity, double W_lo, double W_hi,
                                      std::size_t n, double x_end, double x_B) {
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        grid[i] = W_lo + (W_hi - W_lo) * static_cast<double>(i) / static_cast<double>(n);
    return phase_curve(shooter.representation(), parity, shooter.V(), grid, x_B,
                       [&](double W) { return tail_sample(shooter, parity, W, x_end, x_B); });
}

/// Breit-Wigner lifetime of one resonance. The W grid is centred on W_nu
/// with a spacing of 1/samples_per_width of the width estimate `gamma`
/// (typically the resonance objective minimum or a flux rate).
inline BreitWignerResult bw_lifetime(const tidse::Shooter& shooter, const tidse::ResonanceRecord& r, double gamma,
                                     const BreitWignerOptions& opt = {}) {
    if (!(gamma > 0.0)) throw DomainError("bw_lifetime: width estimate must be positive");
    const double h = gamma / opt.samples_per_width;
    const auto half = static_cast<std::size_t>(std::ceil(opt.half_span_widths * opt.samples_per_width));
    const double lo = r.W - static_cast<double>(half) * h;
    const double x_end = shooter.divergence_free_range(r.parity, r.x_max, std::array<double, 2>{lo, r.W});
    const double x_B = x_end - opt.x_B_offset;
    std::vector<double> grid(2 * half + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = lo + static_cast<double>(i) * h;
    grid[half] = r.W;
    const auto curve = phase_curve(shooter.representation(), r.parity, shooter.V(), grid, x_B, [&](double W) {
        return tail_sample(shooter, r.parity, W, x_end, x_B);
    });
    return lifetime_bw(curve, r.W);
}

struct PhaseScanOptions {
    double spacing = 5e-3;  ///< background W spacing
    /// Offsets around each resonance in units of its width estimate.
    std::vector<double> cluster{0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0,
                                5.0,  8.0, 12.0, 20.0, 35.0, 60.0, 100.0};
    double x_B_offset = 1.0;
    int attempts = 6;
};

/// Phase across each resonance of one parity: one curve per level from the
/// midpoint to the previous same-parity level to the midpoint to the next
/// (half a spacing outside at the ends), with x_B taken from that level's
/// own range so that it lies outside the bound state. `step` is the rise of
/// phi - phi0 over W_nu +- (largest cluster offset) widths, clipped to the
/// segment.
struct PhaseScan {
    std::vector<PhaseCurve> segments;
    std::vector<int> nu;
    std::vector<double> W_nu;
    std::vector<double> step;
};

inline PhaseScan phase_scan(const tidse::Shooter& shooter, const std::vector<tidse::ResonanceRecord>& recs,
                            const std::vector<double>& widths, Parity parity, const PhaseScanOptions& opt = {}) {
    if (recs.size() != widths.size()) throw DomainError("phase_scan: one width per resonance required");
    std::vector<std::size_t> sel;
    for (std::size_t k = 0; k < recs.size(); ++k)
        if (recs[k].parity == parity) sel.push_back(k);
    if (sel.empty()) throw DomainError("phase_scan: no resonance of this parity");
    std::vector<double> mids;
    for (std::size_t m = 0; m + 1 < sel.size(); ++m) mids.push_back(0.5 * (recs[sel[m]].W + recs[sel[m + 1]].W));
    const double first = recs[sel.front()].W, last = recs[sel.back()].W;
    const double gap_lo = sel.size() > 1 ? recs[sel[1]].W - first : 1.0;
    const double gap_hi = sel.size() > 1 ? last - recs[sel[sel.size() - 2]].W : 1.0;
    mids.insert(mids.begin(), std::max(first - 0.5 * gap_lo, shooter.V() + 1e-3));
    mids.push_back(last + 0.5 * gap_hi);

    PhaseScan out;
    for (std::size_t m = 0; m < sel.size(); ++m) {
        const auto& r = recs[sel[m]];
        const double lo = mids[m], hi = mids[m + 1];
        std::vector<double> grid;
        const auto n = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil((hi - lo) / opt.spacing)));
        for (std::size_t i = 0; i <= n; ++i)
            grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
        grid.push_back(r.W);
        for (double t : opt.cluster)
            for (double sgn : {-1.0, 1.0}) {
                const double W = r.W + sgn * t * widths[sel[m]];
                if (W > lo && W < hi) grid.push_back(W);
            }
        std::sort(grid.begin(), grid.end());
        std::vector<double> uniq;
        for (double W : grid)
            if (uniq.empty() || W - uniq.back() > 1e-12 * W) uniq.push_back(W);
        double x_end = shooter.divergence_free_range(parity, r.x_max, std::array<double, 3>{lo, r.W, hi});
        for (int a = 0;; ++a) {
            try {
                const double x_B = x_end - opt.x_B_offset;
                out.segments.push_back(phase_curve(shooter.representation(), parity, shooter.V(), uniq, x_B,
                                                   [&](double W) { return tail_sample(shooter, parity, W, x_end, x_B); }));
                break;
            } catch (const TruncationError& e) {
                if (a + 1 >= opt.attempts) throw;
                x_end = e.last_valid_x() - 0.5;
            }
        }
        const auto& c = out.segments.back();
        out.nu.push_back(r.nu);
        out.W_nu.push_back(r.W);
        // Rise across the outermost cluster offsets, clipped to the segment.
        const double reach = opt.cluster.empty() ? 0.0 : opt.cluster.back() * widths[sel[m]];
        auto nearest = [&](double W) {
            const auto it = std::lower_bound(c.W.begin(), c.W.end(), W);
            if (it == c.W.end()) return c.size() - 1;
            const auto i = static_cast<std::size_t>(it - c.W.begin());
            return (i > 0 && W - c.W[i - 1] < c.W[i] - W) ? i - 1 : i;
        };
        const std::size_t a = nearest(std::max(lo, r.W - reach)), b = nearest(std::min(hi, r.W + reach));
        out.step.push_back(c.relative(b) - c.relative(a));
    }
    return out;
}

}  // namespace msac::stationary
