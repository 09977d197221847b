// msac: resonances and nonadiabatic lifetimes of metastable states on an
// avoided crossing of two linear diabats.
//
//   msac scan      --v 1.5275                 resonance tables only
//   msac lifetimes --v 1.5275                 flux and Breit-Wigner, both representations
//   msac tdse      --v 1.5275                 wave-packet norm decay
//   msac fgr | lz  --v 0.306:2.75:10          approximations
//   msac sweep     --config configs/sweep10.ini
//   msac export    --config ...               figure data from cached resonances
//   msac convert-units --physical M,ALPHA,VP,HBAR --in out/lifetimes.csv
//
// Exit codes: 0 success, 1 partial failures, 2 configuration error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "msac/pipeline/config.hpp"
#include "msac/pipeline/exports.hpp"
#include "msac/pipeline/sweep.hpp"
#include "msac/pipeline/tables.hpp"

namespace fs = std::filesystem;
using namespace msac;
using namespace msac::pipeline;

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<std::string> v;
    std::optional<double> dx;
    std::optional<double> xmax;
    std::optional<std::string> methods;
    std::optional<std::string> physical;
    std::string in;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--jobs", f.jobs, "worker threads");
    sub->add_option("--v", f.v, "coupling values: a,b,c or lo:hi:count");
    sub->add_option("--dx", f.dx, "grid step");
    sub->add_option("--xmax", f.xmax, "fixed half-width of the grid (default: V-dependent schedule)");
    sub->add_option("--methods", f.methods, "nad_FC,ad_FC,... or all,tidse,fc,bw,tdse,approx");
    sub->add_option("--physical", f.physical, "physical units M,ALPHA,VP,HBAR");
}

// Defaults, then the config file, then the subcommand's method set, then
// flags. `sweep` runs every method unless the config file lists them.
RunConfig build_config(const Flags& f, const std::string& default_methods) {
    RunConfig c;
    const bool sweep = default_methods == "all";
    if (sweep) c.methods = MethodSet::parse(default_methods);
    if (!f.config.empty()) load_config(f.config, c);
    if (!sweep && !default_methods.empty()) c.methods = MethodSet::parse(default_methods);
    if (f.out) c.out_dir = *f.out;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.v) c.V = parse_v_list(*f.v);
    if (f.dx) c.dx = *f.dx;
    if (f.xmax) c.x_max.fixed = *f.xmax;
    if (f.methods) c.methods = MethodSet::parse(*f.methods);
    if (f.physical) c.physical = parse_physical(*f.physical);
    c.validate();
    return c;
}

void warn_on_hash_change(const RunConfig& c) {
    const fs::path m = fs::path(c.out_dir) / "manifest.json";
    if (!fs::exists(m)) return;
    try {
        std::ifstream in(m);
        const auto j = nlohmann::json::parse(in);
        const auto old = j.value("config_hash", std::string());
        if (!old.empty() && old != config_hash(c)) {
            std::cerr << "warning: configuration differs from the previous run in " << c.out_dir << " (" << old
                      << " -> " << config_hash(c) << "); resonance tables with a different key are recomputed\n";
        }
    } catch (const std::exception&) {
        std::cerr << "warning: unreadable manifest in " << c.out_dir << "\n";
    }
}

int report(const SweepResult& r, const RunConfig& c, double seconds) {
    std::cout << "resonances " << r.resonances.size() << " (scanned " << r.scans << ", cached " << r.cache_hits
              << "), rows " << r.rows.size() << ", failures " << r.failures << ", " << seconds << " s -> "
              << c.out_dir << "\n";
    for (const auto& e : r.scan_errors) std::cerr << "scan error: " << e << "\n";
    for (const auto& row : r.rows)
        if (!row.tau && row.flags.find("not_computed") == std::string::npos)
            std::cerr << "failed: V=" << format_double(row.V) << " nu=" << row.nu << " " << to_string(row.method)
                      << " [" << row.flags << "]\n";
    return (r.failures > 0 || !r.scan_errors.empty()) ? 1 : 0;
}

int run_compute(const Flags& f, const std::string& methods, bool scan_only) {
    const RunConfig c = build_config(f, methods);
    warn_on_hash_change(c);
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult r = compute_sweep(c, true, scan_only);
    write_outputs(c, r);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report(r, c, s);
}

int run_export(const Flags& f) {
    const RunConfig c = build_config(f, "");
    SweepResult r = compute_sweep(c, false, true);
    std::string hash;
    const fs::path table = fs::path(c.out_dir) / "lifetimes.csv";
    if (fs::exists(table)) r.rows = read_lifetimes(table, &hash);
    r.files = figure_data(c);
    write_outputs(c, r, hash);
    std::cout << "exported " << r.files.size() << " figure tables, " << r.rows.size() << " lifetime rows -> "
              << c.out_dir << "\n";
    return r.scan_errors.empty() ? 0 : 1;
}

int run_convert(const Flags& f) {
    RunConfig c;
    if (!f.config.empty()) load_config(f.config, c);
    if (f.physical) c.physical = parse_physical(*f.physical);
    if (f.out) c.out_dir = *f.out;
    if (!c.physical) throw ConfigError("convert-units needs physical inputs (--physical or [units] physical)");
    const auto u = model::scale_physical(*c.physical);
    const fs::path in = f.in.empty() ? fs::path(c.out_dir) / "lifetimes.csv" : fs::path(f.in);
    if (!fs::exists(in)) throw ConfigError("no lifetime table at " + in.string());
    std::string hash;
    const auto rows = read_lifetimes(in, &hash);
    const fs::path out = fs::path(c.out_dir) / "lifetimes_physical.csv";
    write_atomic(out, lifetimes_csv(rows, hash, u));
    std::cout << "V = " << format_double(u.V) << ", l0 = " << format_double(u.l0) << ", w0 = " << format_double(u.w0)
              << ", t0 = " << format_double(u.t0) << " -> " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonadiabatic lifetimes of metastable states on an avoided crossing"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);
    Flags f;
    struct Sub {
        const char* name;
        const char* help;
        const char* methods;
    };
    const Sub subs[] = {{"scan", "resonance tables only", ""},
                        {"lifetimes", "flux and Breit-Wigner lifetimes in both representations", "tidse"},
                        {"tdse", "wave-packet lifetimes in both representations", "tdse"},
                        {"fgr", "Fermi golden rule lifetimes", "FGR"},
                        {"lz", "Landau-Zener lifetimes", "LZ"},
                        {"sweep", "every method, or those of the config file or --methods", "all"},
                        {"export", "resonance tables and figure data from the cache", ""},
                        {"convert-units", "add physical-unit columns to a lifetime table", ""}};
    std::string chosen, default_methods;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, f);
        if (std::string(s.name) == "convert-units") sub->add_option("--in", f.in, "lifetime table to convert");
        sub->callback([&, s] {
            chosen = s.name;
            default_methods = s.methods;
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (chosen == "scan") return run_compute(f, "", true);
        if (chosen == "export") return run_export(f);
        if (chosen == "convert-units") return run_convert(f);
        return run_compute(f, default_methods, false);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
