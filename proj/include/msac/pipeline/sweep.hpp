#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "msac/approx/fgr.hpp"
#include "msac/approx/lz.hpp"
#include "msac/pipeline/config.hpp"
#include "msac/pipeline/tables.hpp"
#include "msac/stationary/methods.hpp"
#include "msac/tdse/decay.hpp"
#include "msac/tidse/resonance.hpp"

namespace msac::pipeline {

/// Run fn(0..n-1) on up to `jobs` threads. Exceptions escaping fn are
/// rethrown after all workers finish (the first one wins).
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex m;
    std::vector<std::thread> pool;
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Error text safe for a CSV cell.
inline std::string cell_text(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ' ';
    return s;
}

inline std::string v_tag(double V) { return "V" + format_double(V); }

inline std::string rep_tag(Representation r) { return r == Representation::diabatic ? "nad" : "ad"; }

inline std::string cache_name(const RunConfig& cfg, double V, Representation rep) {
    return "cache/resonances_" + fnv1a_hex(resonance_key(cfg, V, rep)) + ".csv";
}

/// Resonance table for (V, representation), read from the cache when the
/// key hash matches. `hit` reports whether the cache was used.
inline std::vector<tidse::ResonanceRecord> cached_scan(const RunConfig& cfg, double V, Representation rep,
                                                       bool* hit = nullptr) {
    const auto path = std::filesystem::path(cfg.out_dir) / cache_name(cfg, V, rep);
    if (std::filesystem::exists(path)) {
        try {
            auto recs = read_resonances(path);
            if (hit) *hit = true;
            return recs;
        } catch (const Error& e) {
            std::cerr << "warning: unreadable cache " << path << " (" << e.what() << "), recomputing\n";
        }
    }
    auto recs = tidse::scan_resonances(V, rep, cfg.resonance_options());
    write_atomic(path, resonances_csv(recs));
    if (hit) *hit = false;
    return recs;
}

struct FileOutput {
    std::string name;  ///< relative to the output directory
    std::string text;
};

/// Flux and Breit-Wigner rows for one resonance.
inline std::vector<LifetimeRow> stationary_rows(const RunConfig& cfg, const tidse::ResonanceRecord& r,
                                                bool want_fc, bool want_bw) {
    const tidse::Shooter sh(r.representation, r.V, cfg.resonance_options().shooting);
    const bool dia = r.representation == Representation::diabatic;
    LifetimeRow base;
    base.V = r.V;
    base.nu = r.nu;
    base.parity = r.parity;
    base.W = r.W;
    base.dx = r.dx;
    base.x_max = r.x_max;
    std::vector<LifetimeRow> out;
    LifetimeRow fc = base, bw = base;
    fc.method = dia ? Method::nad_FC : Method::ad_FC;
    bw.method = dia ? Method::nad_BW : Method::ad_BW;
    double width = r.gamma_min;
    try {
        const auto f = stationary::flux_lifetime(sh, r, cfg.flux);
        fc.tau = f.tau;
        width = f.gamma;
    } catch (const std::exception& e) {
        fc.flag("error=" + cell_text(e.what()));
    }
    if (want_bw) {
        try {
            const auto b = stationary::bw_lifetime(sh, r, width, cfg.bw);
            bw.tau = b.tau;
            if (b.background_flag) bw.flag("background");
        } catch (const std::exception& e) {
            bw.flag("error=" + cell_text(e.what()));
        }
    }
    if (want_fc) out.push_back(fc);
    if (want_bw) out.push_back(bw);
    return out;
}

/// TDSE row for one resonance, plus its norm trace. Levels whose expected
/// time to shed the transient exceeds half of T_end are not propagated.
inline LifetimeRow tdse_row(const RunConfig& cfg, const tidse::ResonanceRecord& r, std::vector<FileOutput>* files) {
    LifetimeRow row;
    row.V = r.V;
    row.nu = r.nu;
    row.parity = r.parity;
    row.W = r.W;
    row.dx = r.dx;
    row.x_max = r.x_max;
    row.method = r.representation == Representation::diabatic ? Method::nad_TDSE : Method::ad_TDSE;
    const double tau_est = 1.0 / r.gamma_min;
    if (tau_est * std::log(1.0 / cfg.tdse.fit.P_start) > 0.5 * cfg.tdse.T_end) {
        row.flag("not_computed");
        return row;
    }
    try {
        const tidse::Shooter sh(r.representation, r.V, cfg.resonance_options().shooting);
        const auto state = tdse::prepare_initial_state(stationary::resonance_wave(sh, r));
        const auto absorber = tdse::make_absorber(r.V, r.W, state.grid.x_max(), cfg.tdse.absorber);
        tdse::PropagationOptions po;
        po.dt = cfg.tdse.dt;
        po.T_end = cfg.tdse.T_end;
        po.record_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.tdse.record_interval / cfg.tdse.dt)));
        po.stop_norm = cfg.tdse.fit.P_end;
        auto trace = tdse::propagate(state, absorber, po);
        if (files) {
            std::ostringstream o;
            o << "t,P\n";
            for (std::size_t i = 0; i < trace.t.size(); ++i) o << format_double(trace.t[i]) << "," << format_double(trace.P[i]) << "\n";
            files->push_back({"traces/" + v_tag(r.V) + "_nu" + std::to_string(r.nu) + "_" + rep_tag(r.representation) + ".csv", o.str()});
        }
        tdse::lifetime_from_norm(trace, cfg.tdse.fit);
        row.tau = trace.tau;
        if (trace.reflection_warning) row.flag("reflection_warning");
    } catch (const std::exception& e) {
        row.flag("error=" + cell_text(e.what()));
    }
    return row;
}

/// FGR row for level nu with its density dump.
inline LifetimeRow fgr_row(const RunConfig& cfg, double V, int nu, std::vector<FileOutput>* files) {
    LifetimeRow row;
    row.V = V;
    row.nu = nu;
    row.parity = nu % 2 == 0 ? Parity::even : Parity::odd;
    row.method = Method::FGR;
    try {
        approx::FgrOptions o = cfg.fgr;
        o.window = cfg.window;
        o.densities = files != nullptr;
        const auto r = approx::fgr_lifetime(V, nu, o);
        row.W = r.W_fgr;
        row.tau = r.tau;
        row.dx = r.dx;
        row.x_max = r.densities.x.empty() ? 0.0 : r.densities.x.back();
        row.flag("refinements=" + std::to_string(r.refinements));
        if (files) {
            std::ostringstream s;
            s << "x,m_A,m_B,m_Sigma,M_cum\n";
            const auto& d = r.densities;
            const auto stride = static_cast<std::size_t>(cfg.density_stride);
            const std::size_t mid = d.x.size() / 2;
            for (std::size_t i = mid % stride; i < d.x.size(); i += stride) {
                s << format_double(d.x[i]) << "," << format_double(d.m_A[i]) << "," << format_double(d.m_B[i]) << ","
                  << format_double(d.m_Sigma[i]) << "," << format_double(d.M_cum[i]) << "\n";
            }
            files->push_back({"fgr_density/" + v_tag(V) + "_nu" + std::to_string(nu) + ".csv", s.str()});
        }
    } catch (const std::exception& e) {
        row.flag("error=" + cell_text(e.what()));
    }
    return row;
}

inline std::vector<LifetimeRow> lz_rows(const RunConfig& cfg, const std::vector<tidse::ResonanceRecord>& ad) {
    std::vector<double> W;
    for (const auto& r : ad) W.push_back(r.W);
    std::vector<LifetimeRow> out;
    for (std::size_t k = 0; k < ad.size(); ++k) {
        LifetimeRow row;
        row.V = ad[k].V;
        row.nu = ad[k].nu;
        row.parity = ad[k].parity;
        row.W = ad[k].W;
        row.dx = ad[k].dx;
        row.x_max = ad[k].x_max;
        row.method = Method::LZ;
        try {
            const auto r = approx::lz_lifetime(ad[k].V, W, k, cfg.lz_velocity);
            row.tau = r.tau;
            if (r.reflected_lower) row.flag("reflected_lower");
            if (r.reflected_upper) row.flag("reflected_upper");
        } catch (const std::exception& e) {
            row.flag("error=" + cell_text(e.what()));
        }
        out.push_back(row);
    }
    return out;
}

struct SweepResult {
    std::vector<tidse::ResonanceRecord> resonances;  ///< ordered by (V, representation, nu)
    std::vector<LifetimeRow> rows;                   ///< ordered by (V, nu, method)
    std::vector<FileOutput> files;                   ///< traces and densities, ordered by name
    int cache_hits = 0;
    int scans = 0;
    int failures = 0;  ///< rows without a lifetime for a reason other than not_computed
    std::vector<std::string> scan_errors;
    std::vector<std::string> cache_files;
};

/// All requested computations for every V. Scans run first (cached), then
/// one task per (V, nu, method group); results are merged in a fixed order.
/// With scan_only, resonances are located for both representations and no
/// lifetime is computed.
inline SweepResult compute_sweep(const RunConfig& cfg, bool write_files = true, bool scan_only = false) {
    cfg.validate();
    const bool need_dia = scan_only || cfg.methods.has(Method::nad_FC) || cfg.methods.has(Method::nad_BW) ||
                          cfg.methods.has(Method::nad_TDSE);
    const bool need_ad = scan_only || cfg.methods.has(Method::ad_FC) || cfg.methods.has(Method::ad_BW) ||
                         cfg.methods.has(Method::ad_TDSE) || cfg.methods.has(Method::FGR) ||
                         cfg.methods.has(Method::LZ);
    struct ScanTask {
        double V;
        Representation rep;
        std::vector<tidse::ResonanceRecord> recs;
        bool hit = false;
        std::string error;
    };
    std::vector<ScanTask> scans;
    for (double V : cfg.V) {
        if (need_dia) scans.push_back({V, Representation::diabatic, {}, false, {}});
        if (need_ad) scans.push_back({V, Representation::adiabatic, {}, false, {}});
    }
    parallel_for(scans.size(), cfg.jobs, [&](std::size_t i) {
        auto& t = scans[i];
        try {
            t.recs = cached_scan(cfg, t.V, t.rep, &t.hit);
        } catch (const std::exception& e) {
            t.error = e.what();
        }
    });

    SweepResult res;
    std::map<std::pair<double, int>, const ScanTask*> by_key;
    for (const auto& t : scans) {
        by_key[{t.V, static_cast<int>(t.rep)}] = &t;
        res.cache_hits += t.hit ? 1 : 0;
        res.scans += t.hit ? 0 : 1;
        if (!t.error.empty()) res.scan_errors.push_back("V=" + format_double(t.V) + " " + std::string(to_string(t.rep)) + ": " + t.error);
        res.resonances.insert(res.resonances.end(), t.recs.begin(), t.recs.end());
        if (t.error.empty()) res.cache_files.push_back(cache_name(cfg, t.V, t.rep));
    }
    if (scan_only) {
        std::stable_sort(res.resonances.begin(), res.resonances.end(), [](const auto& a, const auto& b) {
            if (a.V != b.V) return a.V < b.V;
            if (a.representation != b.representation) return a.representation < b.representation;
            return a.nu < b.nu;
        });
        return res;
    }

    struct Task {
        enum Kind { stationary, tdse, fgr, lz } kind;
        const tidse::ResonanceRecord* rec = nullptr;
        double V = 0.0;
        int nu = 0;
        std::vector<LifetimeRow> rows;
        std::vector<FileOutput> files;
    };
    std::vector<Task> tasks;
    for (const auto& t : scans) {
        const bool dia = t.rep == Representation::diabatic;
        const bool fc = cfg.methods.has(dia ? Method::nad_FC : Method::ad_FC);
        const bool bw = cfg.methods.has(dia ? Method::nad_BW : Method::ad_BW);
        const bool td = cfg.methods.has(dia ? Method::nad_TDSE : Method::ad_TDSE);
        for (const auto& r : t.recs) {
            if (fc || bw) tasks.push_back({Task::stationary, &r, t.V, r.nu, {}, {}});
            if (td) tasks.push_back({Task::tdse, &r, t.V, r.nu, {}, {}});
        }
        if (!dia) {
            if (cfg.methods.has(Method::FGR))
                for (const auto& r : t.recs) tasks.push_back({Task::fgr, nullptr, t.V, r.nu, {}, {}});
            if (cfg.methods.has(Method::LZ)) tasks.push_back({Task::lz, nullptr, t.V, 0, {}, {}});
        }
    }
    // Longest tasks first keeps the pool busy.
    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return (tasks[a].kind == Task::tdse) > (tasks[b].kind == Task::tdse);
    });
    parallel_for(order.size(), cfg.jobs, [&](std::size_t k) {
        auto& t = tasks[order[k]];
        switch (t.kind) {
            case Task::stationary: {
                const bool dia = t.rec->representation == Representation::diabatic;
                t.rows = stationary_rows(cfg, *t.rec, cfg.methods.has(dia ? Method::nad_FC : Method::ad_FC),
                                         cfg.methods.has(dia ? Method::nad_BW : Method::ad_BW));
                break;
            }
            case Task::tdse: t.rows = {tdse_row(cfg, *t.rec, write_files ? &t.files : nullptr)}; break;
            case Task::fgr: t.rows = {fgr_row(cfg, t.V, t.nu, write_files ? &t.files : nullptr)}; break;
            case Task::lz: {
                const auto* s = by_key.at({t.V, static_cast<int>(Representation::adiabatic)});
                t.rows = lz_rows(cfg, s->recs);
                break;
            }
        }
    });
    for (auto& t : tasks) {
        res.rows.insert(res.rows.end(), t.rows.begin(), t.rows.end());
        res.files.insert(res.files.end(), t.files.begin(), t.files.end());
    }
    std::stable_sort(res.rows.begin(), res.rows.end(), row_less);
    std::sort(res.files.begin(), res.files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    std::stable_sort(res.resonances.begin(), res.resonances.end(), [](const auto& a, const auto& b) {
        if (a.V != b.V) return a.V < b.V;
        if (a.representation != b.representation) return a.representation < b.representation;
        return a.nu < b.nu;
    });
    for (const auto& r : res.rows)
        if (!r.tau && r.flags.find("not_computed") == std::string::npos) ++res.failures;
    return res;
}

inline std::optional<model::ScaledParams> unit_factors(const RunConfig& cfg) {
    if (!cfg.physical) return std::nullopt;
    return model::scale_physical(*cfg.physical);
}

/// Write tables, dumps and manifest.json into cfg.out_dir. `hash` defaults
/// to the hash of cfg; re-exports pass the hash of the table they re-emit.
inline void write_outputs(const RunConfig& cfg, const SweepResult& res, std::string hash = {}) {
    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    if (hash.empty()) hash = config_hash(cfg);
    std::vector<std::pair<std::string, std::size_t>> listed;
    auto emit = [&](const std::string& name, const std::string& text, std::size_t rows) {
        write_atomic(out / name, text);
        listed.emplace_back(name, rows);
    };
    emit("resonances.csv", resonances_csv(res.resonances), res.resonances.size());
    if (!res.rows.empty()) emit("lifetimes.csv", lifetimes_csv(res.rows, hash, unit_factors(cfg)), res.rows.size());
    for (const auto& f : res.files)
        emit(f.name, f.text, static_cast<std::size_t>(std::count(f.text.begin(), f.text.end(), '\n')) - 1);

    nlohmann::ordered_json m;
    m["tool"] = "msac";
    m["tool_version"] = tool_version;
    m["csv_schema_version"] = csv_schema_version;
    m["config_hash"] = hash;
    m["config"] = config_key(cfg);
    m["schemas"] = {{"resonances.csv", resonance_header},
                    {"lifetimes.csv", std::string(lifetime_header) + (cfg.physical ? ",W_phys,tau_phys" : "")},
                    {"traces/*.csv", "t,P"},
                    {"fgr_density/*.csv", "x,m_A,m_B,m_Sigma,M_cum"}};
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& [name, rows] : listed) files.push_back({{"path", name}, {"rows", rows}});
    m["files"] = files;
    m["cache"] = res.cache_files;
    m["failures"] = res.failures;
    nlohmann::ordered_json errs = nlohmann::ordered_json::array();
    for (const auto& e : res.scan_errors) errs.push_back(e);
    m["scan_errors"] = errs;
    write_atomic(out / "manifest.json", m.dump(2) + "\n");
}

}  // namespace msac::pipeline
