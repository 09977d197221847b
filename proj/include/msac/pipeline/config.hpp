#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "msac/approx/fgr.hpp"
#include "msac/approx/lz.hpp"
#include "msac/error.hpp"
#include "msac/model/units.hpp"
#include "msac/stationary/flux.hpp"
#include "msac/stationary/methods.hpp"
#include "msac/tdse/absorber.hpp"
#include "msac/tdse/decay.hpp"
#include "msac/tidse/resonance.hpp"

namespace msac::pipeline {

inline constexpr const char* tool_version = "1.0.0";
inline constexpr int csv_schema_version = 1;

/// Lifetime methods in output order.
enum class Method { nad_FC, ad_FC, nad_BW, ad_BW, nad_TDSE, ad_TDSE, FGR, LZ };
inline constexpr Method all_methods[] = {Method::nad_FC,   Method::ad_FC,   Method::nad_BW, Method::ad_BW,
                                         Method::nad_TDSE, Method::ad_TDSE, Method::FGR,    Method::LZ};

inline std::string to_string(Method m) {
    switch (m) {
        case Method::nad_FC: return "nad_FC";
        case Method::ad_FC: return "ad_FC";
        case Method::nad_BW: return "nad_BW";
        case Method::ad_BW: return "ad_BW";
        case Method::nad_TDSE: return "nad_TDSE";
        case Method::ad_TDSE: return "ad_TDSE";
        case Method::FGR: return "FGR";
        case Method::LZ: return "LZ";
    }
    return "?";
}

inline Representation representation_of(Method m) {
    return (m == Method::nad_FC || m == Method::nad_BW || m == Method::nad_TDSE) ? Representation::diabatic
                                                                                 : Representation::adiabatic;
}

struct MethodSet {
    std::vector<Method> list;

    [[nodiscard]] bool has(Method m) const { return std::find(list.begin(), list.end(), m) != list.end(); }
    [[nodiscard]] bool empty() const noexcept { return list.empty(); }

    /// Comma list of method names or the groups all, tidse (FC and BW in
    /// both representations), fc, bw, tdse, approx (FGR and LZ).
    static MethodSet parse(const std::string& text) {
        std::vector<std::string> parts;
        boost::split(parts, text, boost::is_any_of(", "), boost::token_compress_on);
        MethodSet s;
        auto add = [&](std::initializer_list<Method> ms) {
            for (Method m : ms)
                if (!s.has(m)) s.list.push_back(m);
        };
        for (auto p : parts) {
            boost::trim(p);
            if (p.empty()) continue;
            const std::string q = boost::to_lower_copy(p);
            if (q == "all") add({Method::nad_FC, Method::ad_FC, Method::nad_BW, Method::ad_BW, Method::nad_TDSE,
                                 Method::ad_TDSE, Method::FGR, Method::LZ});
            else if (q == "tidse") add({Method::nad_FC, Method::ad_FC, Method::nad_BW, Method::ad_BW});
            else if (q == "fc") add({Method::nad_FC, Method::ad_FC});
            else if (q == "bw") add({Method::nad_BW, Method::ad_BW});
            else if (q == "tdse") add({Method::nad_TDSE, Method::ad_TDSE});
            else if (q == "approx") add({Method::FGR, Method::LZ});
            else {
                bool found = false;
                for (Method m : all_methods)
                    if (boost::to_lower_copy(to_string(m)) == q) {
                        add({m});
                        found = true;
                    }
                if (!found) throw ConfigError("unknown method '" + p + "'");
            }
        }
        std::sort(s.list.begin(), s.list.end());
        return s;
    }

    [[nodiscard]] std::string str() const {
        std::string out;
        for (Method m : list) out += (out.empty() ? "" : ",") + to_string(m);
        return out;
    }
};

struct TdseSettings {
    /// Larger than the reference 1e-3: the fitted lifetimes change by less
    /// than 1e-4 between 1e-3 and 0.1 while the cost drops fifty-fold.
    double dt = 0.05;
    double T_end = 1200.0;
    double record_interval = 1.0;
    tdse::AbsorberOptions absorber;
    tdse::FitOptions fit;
};

struct RunConfig {
    std::vector<double> V;
    double window = 3.65;
    double dx = 1e-3;
    tidse::XmaxSchedule x_max;
    MethodSet methods = MethodSet::parse("tidse,approx");
    TdseSettings tdse;
    approx::FgrOptions fgr;
    approx::VelocityRule lz_velocity = approx::VelocityRule::two_W;
    stationary::FluxOptions flux;
    stationary::BreitWignerOptions bw;
    std::string out_dir = "out";
    int jobs = 1;
    int density_stride = 20;
    std::optional<model::PhysicalInputs> physical;

    [[nodiscard]] tidse::ResonanceOptions resonance_options() const {
        tidse::ResonanceOptions o;
        o.shooting.dx = dx;
        o.shooting.x_max = x_max;
        o.window = window;
        return o;
    }

    void validate() const {
        if (V.empty()) throw ConfigError("no V values given");
        for (double v : V)
            if (!(v > 0.0)) throw ConfigError("V values must be positive");
        if (methods.empty()) throw ConfigError("no method selected");
        if (!(dx > 0.0) || !(window > 0.0)) throw ConfigError("dx and window must be positive");
        if (jobs < 1) throw ConfigError("jobs must be at least 1");
        if (!(tdse.dt > 0.0) || !(tdse.T_end > 0.0)) throw ConfigError("TDSE dt and T_end must be positive");
        if (density_stride < 1) throw ConfigError("density_stride must be at least 1");
    }
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Round-trip text for values that are read back (cached resonance tables).
inline std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// 64-bit FNV-1a of a string, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Canonical text of everything that determines a resonance table.
inline std::string resonance_key(const RunConfig& c, double V, Representation rep) {
    std::ostringstream o;
    o << "v" << tool_version << ";table=exact;V=" << format_double(V) << ";rep=" << to_string(rep)
      << ";dx=" << format_double(c.dx) << ";window=" << format_double(c.window)
      << ";xlow=" << format_double(c.x_max.x_low) << ";xhigh=" << format_double(c.x_max.x_high)
      << ";Vlow=" << format_double(c.x_max.V_low) << ";Vhigh=" << format_double(c.x_max.V_high)
      << ";fixed=" << (c.x_max.fixed ? format_double(*c.x_max.fixed) : "-");
    return o.str();
}

/// Canonical text of the whole configuration (output directory excluded).
inline std::string config_key(const RunConfig& c) {
    std::ostringstream o;
    o << "v" << tool_version << ";V=";
    for (double v : c.V) o << format_double(v) << ",";
    o << ";window=" << format_double(c.window) << ";dx=" << format_double(c.dx)
      << ";xlow=" << format_double(c.x_max.x_low) << ";xhigh=" << format_double(c.x_max.x_high)
      << ";fixed=" << (c.x_max.fixed ? format_double(*c.x_max.fixed) : "-") << ";methods=" << c.methods.str()
      << ";dt=" << format_double(c.tdse.dt) << ";T=" << format_double(c.tdse.T_end)
      << ";rec=" << format_double(c.tdse.record_interval) << ";abs=" << format_double(c.tdse.absorber.strength)
      << "," << format_double(c.tdse.absorber.width) << "," << format_double(c.tdse.absorber.decay_exponent)
      << ";fgr=" << format_double(c.fgr.dx) << "," << format_double(c.fgr.tolerance) << "," << c.fgr.max_halvings
      << ";lz=" << static_cast<int>(c.lz_velocity) << ";rk=" << format_double(c.flux.r_k)
      << ";bw=" << c.bw.samples_per_width << "," << format_double(c.bw.half_span_widths)
      << ";fit=" << format_double(c.tdse.fit.P_start) << "," << format_double(c.tdse.fit.P_end)
      << ";stride=" << c.density_stride;
    if (c.physical)
        o << ";phys=" << format_double(c.physical->mass) << "," << format_double(c.physical->alpha) << ","
          << format_double(c.physical->coupling) << "," << format_double(c.physical->hbar);
    return o.str();
}

inline std::string config_hash(const RunConfig& c) { return fnv1a_hex(config_key(c)); }

/// V list: "0.306, 1.5275" or a linear range "lo:hi:count".
inline std::vector<double> parse_v_list(const std::string& text) {
    std::vector<double> out;
    auto num = [](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw ConfigError("bad number '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            throw ConfigError("bad number '" + s + "'");
        }
    };
    std::string t = boost::trim_copy(text);
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> p;
        boost::split(p, t, boost::is_any_of(":"));
        if (p.size() != 3) throw ConfigError("V range must read lo:hi:count");
        const double lo = num(boost::trim_copy(p[0])), hi = num(boost::trim_copy(p[1]));
        const int n = static_cast<int>(num(boost::trim_copy(p[2])));
        if (n < 1) throw ConfigError("V range count must be positive");
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    }
    std::vector<std::string> parts;
    boost::split(parts, t, boost::is_any_of(", "), boost::token_compress_on);
    for (auto& p : parts)
        if (!p.empty()) out.push_back(num(p));
    return out;
}

inline approx::VelocityRule parse_velocity(const std::string& s) {
    const std::string q = boost::to_lower_copy(boost::trim_copy(s));
    if (q == "2w" || q == "sqrt(2w)") return approx::VelocityRule::two_W;
    if (q == "w-v") return approx::VelocityRule::W_minus_V;
    if (q == "2(w-v)") return approx::VelocityRule::two_W_minus_V;
    throw ConfigError("unknown LZ velocity rule '" + s + "'");
}

/// Physical unit inputs "M,ALPHA,VP,HBAR".
inline model::PhysicalInputs parse_physical(const std::string& s) {
    std::vector<std::string> p;
    boost::split(p, s, boost::is_any_of(","));
    if (p.size() != 4) throw ConfigError("physical inputs must read M,ALPHA,VP,HBAR");
    std::vector<double> v;
    for (auto& x : p) {
        const auto list = parse_v_list(x);
        if (list.size() != 1) throw ConfigError("bad physical input '" + x + "'");
        v.push_back(list[0]);
    }
    return {v[0], v[1], v[2], v[3]};
}

/// Read an INI file into `c`; keys not present keep their values. Unknown
/// keys are rejected so that typos do not pass silently.
inline void load_config(const std::string& path, RunConfig& c) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    auto get = [&](const pt::ptree& sec, const std::string& key) { return boost::trim_copy(sec.get<std::string>(key)); };
    auto dbl = [&](const pt::ptree& sec, const std::string& key) {
        const auto v = parse_v_list(get(sec, key));
        if (v.size() != 1) throw ConfigError("key '" + key + "' needs a single number");
        return v[0];
    };
    for (const auto& [section, sec] : tree) {
        for (const auto& [key, val] : sec) {
            const std::string id = section + "." + key;
            if (id == "sweep.V") c.V = parse_v_list(get(sec, key));
            else if (id == "sweep.window") c.window = dbl(sec, key);
            else if (id == "sweep.methods") c.methods = MethodSet::parse(get(sec, key));
            else if (id == "sweep.out") c.out_dir = get(sec, key);
            else if (id == "sweep.jobs") c.jobs = static_cast<int>(dbl(sec, key));
            else if (id == "grid.dx") c.dx = dbl(sec, key);
            else if (id == "grid.x_max") c.x_max.fixed = dbl(sec, key);
            else if (id == "grid.x_low") c.x_max.x_low = dbl(sec, key);
            else if (id == "grid.x_high") c.x_max.x_high = dbl(sec, key);
            else if (id == "tdse.dt") c.tdse.dt = dbl(sec, key);
            else if (id == "tdse.T_end") c.tdse.T_end = dbl(sec, key);
            else if (id == "tdse.record_interval") c.tdse.record_interval = dbl(sec, key);
            else if (id == "tdse.absorber_strength") c.tdse.absorber.strength = dbl(sec, key);
            else if (id == "tdse.absorber_width") c.tdse.absorber.width = dbl(sec, key);
            else if (id == "tdse.absorber_decay") c.tdse.absorber.decay_exponent = dbl(sec, key);
            else if (id == "tdse.fit_start") c.tdse.fit.P_start = dbl(sec, key);
            else if (id == "tdse.fit_end") c.tdse.fit.P_end = dbl(sec, key);
            else if (id == "fgr.dx") c.fgr.dx = dbl(sec, key);
            else if (id == "fgr.tolerance") c.fgr.tolerance = dbl(sec, key);
            else if (id == "fgr.max_halvings") c.fgr.max_halvings = static_cast<int>(dbl(sec, key));
            else if (id == "fgr.density_stride") c.density_stride = static_cast<int>(dbl(sec, key));
            else if (id == "lz.velocity") c.lz_velocity = parse_velocity(get(sec, key));
            else if (id == "stationary.r_k") c.flux.r_k = dbl(sec, key);
            else if (id == "stationary.bw_samples_per_width") c.bw.samples_per_width = static_cast<int>(dbl(sec, key));
            else if (id == "stationary.bw_half_span") c.bw.half_span_widths = dbl(sec, key);
            else if (id == "units.physical") c.physical = parse_physical(get(sec, key));
            else throw ConfigError("unknown config key '" + id + "'");
        }
    }
}

}  // namespace msac::pipeline
