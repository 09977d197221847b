#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "msac/model/adiabatic.hpp"
#include "msac/pipeline/config.hpp"
#include "msac/pipeline/sweep.hpp"
#include "msac/stationary/methods.hpp"
#include "msac/tidse/resonance.hpp"

namespace msac::pipeline {

/// PECs and couplings on [-x_range, x_range]; A_du is also given divided by
/// the harmonic ground-state width V^(1/4).
inline FileOutput potentials_table(double V, double x_range = 10.0, double step = 0.01) {
    std::ostringstream o;
    o << "x,V_u,V_d,Vt_u,Vt_d,A_du,A_du_scaled,B_du,B_uu\n";
    const auto n = static_cast<long>(std::llround(x_range / step));
    for (long i = -n; i <= n; ++i) {
        const double x = static_cast<double>(i) * step;
        const auto p = model::adiabatic_point(x, V);
        o << format_double(x) << "," << format_double(p.V_u) << "," << format_double(p.V_d) << ","
          << format_double(p.Vt_u) << "," << format_double(p.Vt_d) << "," << format_double(p.A_du) << ","
          << format_double(p.A_du / model::harmonic_width(V)) << "," << format_double(p.B_du) << ","
          << format_double(p.B_uu) << "\n";
    }
    return {"figures/potentials_" + v_tag(V) + ".csv", o.str()};
}

/// One stationary resonance wave on the full grid, strided, with both
/// component pairs (the other representation by rotation).
inline FileOutput wave_table(const RunConfig& cfg, const tidse::ResonanceRecord& r, int stride = 10) {
    const tidse::Shooter sh(r.representation, r.V, cfg.resonance_options().shooting);
    const auto w = stationary::resonance_wave(sh, r);
    const auto other = change_representation(
        w, w.representation == Representation::adiabatic ? Representation::diabatic : Representation::adiabatic);
    const auto& ad = w.representation == Representation::adiabatic ? w : other;
    const auto& dia = w.representation == Representation::adiabatic ? other : w;
    std::ostringstream o;
    o << "x,psi_u,psi_d,psi_1,psi_2\n";
    const std::size_t mid = w.grid.center();
    for (std::size_t i = mid % static_cast<std::size_t>(stride); i < w.size(); i += static_cast<std::size_t>(stride)) {
        o << format_double(w.grid.x(i)) << "," << format_double(ad.psi[0][i]) << "," << format_double(ad.psi[1][i])
          << "," << format_double(dia.psi[0][i]) << "," << format_double(dia.psi[1][i]) << "\n";
    }
    return {"figures/wave_" + v_tag(r.V) + "_nu" + std::to_string(r.nu) + "_" + rep_tag(r.representation) + ".csv",
            o.str()};
}

/// Relative phase phi - phi0 across every resonance of one representation.
/// Segments are shifted by multiples of pi so the curve continues across
/// segment boundaries. Columns: W, phase, nu of the segment.
inline FileOutput phase_table(const RunConfig& cfg, const std::vector<tidse::ResonanceRecord>& recs,
                              std::vector<double>* steps = nullptr) {
    if (recs.empty()) throw DomainError("phase_table: no resonances");
    const tidse::Shooter sh(recs.front().representation, recs.front().V, cfg.resonance_options().shooting);
    std::vector<double> widths;
    for (const auto& r : recs) {
        try {
            widths.push_back(stationary::flux_lifetime(sh, r, cfg.flux).gamma);
        } catch (const Error&) {
            widths.push_back(r.gamma_min);
        }
    }
    struct Point {
        double W, phase;
        int nu;
    };
    std::vector<Point> pts;
    if (steps) steps->assign(recs.size(), 0.0);
    for (Parity p : {Parity::even, Parity::odd}) {
        bool any = false;
        for (const auto& r : recs) any = any || r.parity == p;
        if (!any) continue;
        const auto scan = stationary::phase_scan(sh, recs, widths, p);
        double offset = 0.0;
        double prev_end = 0.0;
        for (std::size_t s = 0; s < scan.segments.size(); ++s) {
            const auto& c = scan.segments[s];
            if (s > 0) offset += std::round((prev_end - (c.relative(0) + offset)) / std::numbers::pi) * std::numbers::pi;
            for (std::size_t i = 0; i < c.size(); ++i) pts.push_back({c.W[i], c.relative(i) + offset, scan.nu[s]});
            prev_end = c.relative(c.size() - 1) + offset;
            if (steps) {
                for (std::size_t k = 0; k < recs.size(); ++k)
                    if (recs[k].nu == scan.nu[s]) (*steps)[k] = scan.step[s];
            }
        }
    }
    std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.nu % 2 != b.nu % 2 ? a.nu % 2 < b.nu % 2 : a.W < b.W;
    });
    std::ostringstream o;
    o << "W,phase,nu,parity\n";
    for (const auto& q : pts)
        o << format_double(q.W) << "," << format_double(q.phase) << "," << q.nu << "," << (q.nu % 2 == 0 ? "even" : "odd")
          << "\n";
    return {"figures/phase_" + v_tag(recs.front().V) + "_" + rep_tag(recs.front().representation) + ".csv", o.str()};
}

/// Figure data for every configured V: PECs, waves for nu <= 3 and phase
/// curves in both representations. Resonances come from the cache.
inline std::vector<FileOutput> figure_data(const RunConfig& cfg) {
    struct Job {
        double V;
        int kind;  // 0 potentials, 1 waves+phase diabatic, 2 waves+phase adiabatic
        std::vector<FileOutput> out;
        std::string error;
    };
    std::vector<Job> jobs;
    for (double V : cfg.V)
        for (int k = 0; k < 3; ++k) jobs.push_back({V, k, {}, {}});
    parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
        auto& j = jobs[i];
        try {
            if (j.kind == 0) {
                j.out.push_back(potentials_table(j.V));
                return;
            }
            const auto rep = j.kind == 1 ? Representation::diabatic : Representation::adiabatic;
            const auto recs = cached_scan(cfg, j.V, rep);
            for (const auto& r : recs)
                if (r.nu <= 3) j.out.push_back(wave_table(cfg, r));
            j.out.push_back(phase_table(cfg, recs));
        } catch (const std::exception& e) {
            j.error = e.what();
        }
    });
    std::vector<FileOutput> out;
    for (auto& j : jobs) {
        if (!j.error.empty()) throw Error("figure data for V=" + format_double(j.V) + ": " + j.error);
        out.insert(out.end(), j.out.begin(), j.out.end());
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

}  // namespace msac::pipeline
