#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/algorithm/string.hpp>

#include "msac/approx/lz.hpp"
#include "msac/error.hpp"
#include "msac/model/units.hpp"
#include "msac/pipeline/config.hpp"
#include "msac/tidse/resonance.hpp"

namespace msac::pipeline {

struct LifetimeRow {
    double V = 0.0;
    int nu = 0;
    Parity parity = Parity::even;
    double W = 0.0;
    Method method = Method::ad_FC;
    std::optional<double> tau;  ///< empty when not computed or failed
    std::string flags;          ///< ';'-separated
    double dx = 0.0;
    double x_max = 0.0;

    [[nodiscard]] std::optional<double> Q() const {
        if (!tau) return std::nullopt;
        return approx::q_factor(*tau, V);
    }

    void flag(const std::string& f) { flags += (flags.empty() ? "" : ";") + f; }
};

/// Row order (V, nu, method).
inline bool row_less(const LifetimeRow& a, const LifetimeRow& b) {
    if (a.V != b.V) return a.V < b.V;
    if (a.nu != b.nu) return a.nu < b.nu;
    return a.method < b.method;
}

/// Write through a temporary file and rename, so readers never see a
/// partial table.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp);
        f << text;
        if (!f) throw ConfigError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        boost::split(cells, line, boost::is_any_of(","));
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline const char* resonance_header = "V,nu,parity,W_nu,s_star,tail_amp,x_max,dx,representation,E_closed,gamma_min";

/// Resonance table at full precision, so that cached levels reproduce a fresh scan.
inline std::string resonances_csv(const std::vector<tidse::ResonanceRecord>& recs) {
    std::ostringstream o;
    o << resonance_header << "\n";
    for (const auto& r : recs) {
        o << format_exact(r.V) << "," << r.nu << "," << to_string(r.parity) << "," << format_exact(r.W) << ","
          << format_exact(r.s_star) << "," << format_exact(r.tail_amp) << "," << format_exact(r.x_max) << ","
          << format_exact(r.dx) << "," << to_string(r.representation) << "," << format_exact(r.E_closed) << ","
          << format_exact(r.gamma_min) << "\n";
    }
    return o.str();
}

inline double parse_cell(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::logic_error&) {
        throw ConfigError("bad numeric cell '" + s + "'");
    }
}

inline std::vector<tidse::ResonanceRecord> read_resonances(const std::filesystem::path& path) {
    const auto rows = read_csv(path);
    if (rows.empty() || boost::join(rows[0], ",") != resonance_header) {
        throw ConfigError("unexpected resonance table header in " + path.string());
    }
    std::vector<tidse::ResonanceRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& c = rows[i];
        if (c.size() != 11) throw ConfigError("bad resonance row in " + path.string());
        tidse::ResonanceRecord r;
        r.V = parse_cell(c[0]);
        r.nu = static_cast<int>(parse_cell(c[1]));
        r.parity = c[2] == "even" ? Parity::even : Parity::odd;
        r.W = parse_cell(c[3]);
        r.s_star = parse_cell(c[4]);
        r.tail_amp = parse_cell(c[5]);
        r.x_max = parse_cell(c[6]);
        r.dx = parse_cell(c[7]);
        r.representation = c[8] == "diabatic" ? Representation::diabatic : Representation::adiabatic;
        r.E_closed = parse_cell(c[9]);
        r.gamma_min = parse_cell(c[10]);
        out.push_back(r);
    }
    return out;
}

inline const char* lifetime_header = "V,nu,parity,W_nu,method,tau,Q,flags,dx,x_max,config_hash";

/// Lifetime table; with physical inputs, tau and W are repeated in
/// physical units (tau_phys = tau t0, W_phys = W w0).
inline std::string lifetimes_csv(const std::vector<LifetimeRow>& rows, const std::string& hash,
                                 const std::optional<model::ScaledParams>& units = std::nullopt) {
    std::ostringstream o;
    o << lifetime_header << (units ? ",W_phys,tau_phys" : "") << "\n";
    for (const auto& r : rows) {
        const auto q = r.Q();
        o << format_double(r.V) << "," << r.nu << "," << to_string(r.parity) << "," << format_double(r.W) << ","
          << to_string(r.method) << "," << (r.tau ? format_double(*r.tau) : "") << ","
          << (q ? format_double(*q) : "") << "," << r.flags << "," << format_double(r.dx) << ","
          << format_double(r.x_max) << "," << hash;
        if (units) {
            o << "," << format_double(units->to_physical_energy(r.W)) << ","
              << (r.tau ? format_double(units->to_physical_time(*r.tau)) : "");
        }
        o << "\n";
    }
    return o.str();
}

inline Method parse_method(const std::string& s) {
    for (Method m : all_methods)
        if (to_string(m) == s) return m;
    throw ConfigError("unknown method in table: " + s);
}

inline std::vector<LifetimeRow> read_lifetimes(const std::filesystem::path& path, std::string* hash = nullptr) {
    const auto rows = read_csv(path);
    if (rows.empty() || rows[0].size() < 11 || boost::join(std::vector<std::string>(rows[0].begin(), rows[0].begin() + 11), ",") != lifetime_header) {
        throw ConfigError("unexpected lifetime table header in " + path.string());
    }
    std::vector<LifetimeRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& c = rows[i];
        if (c.size() < 11) throw ConfigError("bad lifetime row in " + path.string());
        LifetimeRow r;
        r.V = parse_cell(c[0]);
        r.nu = static_cast<int>(parse_cell(c[1]));
        r.parity = c[2] == "even" ? Parity::even : Parity::odd;
        r.W = parse_cell(c[3]);
        r.method = parse_method(c[4]);
        if (!c[5].empty()) r.tau = parse_cell(c[5]);
        r.flags = c[7];
        r.dx = parse_cell(c[8]);
        r.x_max = parse_cell(c[9]);
        if (hash) *hash = c[10];
        out.push_back(r);
    }
    return out;
}

}  // namespace msac::pipeline
