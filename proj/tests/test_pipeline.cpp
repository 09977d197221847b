#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "msac/pipeline/config.hpp"
#include "msac/pipeline/sweep.hpp"
#include "msac/pipeline/tables.hpp"

using namespace msac;
using namespace msac::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("msac_test_pipeline_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MSAC_CLI) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// Small, fast configuration: two couplings near the strong end, a narrow window.
RunConfig small_config(const fs::path& out, int jobs) {
    RunConfig c;
    c.V = {2.0, 2.4};
    c.window = 0.8;
    c.methods = MethodSet::parse("fc,LZ");
    c.out_dir = out.string();
    c.jobs = jobs;
    return c;
}

}  // namespace

TEST_CASE("method sets") {
    CHECK(MethodSet::parse("all").list.size() == 8);
    CHECK(MethodSet::parse("tidse").str() == "nad_FC,ad_FC,nad_BW,ad_BW");
    CHECK(MethodSet::parse("LZ, fgr ,ad_fc").str() == "ad_FC,FGR,LZ");
    CHECK(MethodSet::parse("tdse,tdse").list.size() == 2);
    CHECK_THROWS_AS(MethodSet::parse("fc,nope"), ConfigError);
}

TEST_CASE("V lists") {
    CHECK(parse_v_list("0.306, 1.5275") == std::vector<double>{0.306, 1.5275});
    const auto r = parse_v_list("0.306:2.75:10");
    REQUIRE(r.size() == 10);
    CHECK(r.front() == 0.306);
    CHECK(r.back() == doctest::Approx(2.75).epsilon(1e-15));
    CHECK(r[1] - r[0] == doctest::Approx((2.75 - 0.306) / 9));
    CHECK_THROWS_AS(parse_v_list("1:2"), ConfigError);
    CHECK_THROWS_AS(parse_v_list("1.0,abc"), ConfigError);
}

TEST_CASE("configuration files") {
    const auto dir = scratch("config");
    write_file(dir / "ok.ini", "[sweep]\nV = 0.5:1.5:3\nmethods = fc\nwindow = 2\n[grid]\ndx = 0.002\n[tdse]\ndt = 0.1\n");
    RunConfig c;
    load_config((dir / "ok.ini").string(), c);
    CHECK(c.V.size() == 3);
    CHECK(c.methods.str() == "nad_FC,ad_FC");
    CHECK(c.window == 2.0);
    CHECK(c.dx == 0.002);
    CHECK(c.tdse.dt == 0.1);
    CHECK_NOTHROW(c.validate());

    write_file(dir / "typo.ini", "[grid]\ndxx = 0.002\n");
    RunConfig t;
    CHECK_THROWS_AS(load_config((dir / "typo.ini").string(), t), ConfigError);

    RunConfig empty;
    CHECK_THROWS_AS(empty.validate(), ConfigError);
    RunConfig neg;
    neg.V = {-1.0};
    CHECK_THROWS_AS(neg.validate(), ConfigError);
}

TEST_CASE("configuration hash is deterministic and sensitive") {
    RunConfig a;
    a.V = {1.0};
    RunConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.out_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.dx = 2e-3;
    CHECK(config_hash(a) != config_hash(b));
    RunConfig c = a;
    c.tdse.fit.P_end = 0.2;
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("tables round-trip") {
    const auto dir = scratch("tables");
    tidse::ResonanceRecord r;
    r.V = 1.0 / 3.0;
    r.nu = 3;
    r.parity = Parity::odd;
    r.W = 1.234567890123456789;
    r.gamma_min = 3.3e-11;
    r.representation = Representation::diabatic;
    write_atomic(dir / "res.csv", resonances_csv({r}));
    const auto back = read_resonances(dir / "res.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].W == r.W);
    CHECK(back[0].V == r.V);
    CHECK(back[0].gamma_min == r.gamma_min);
    CHECK(back[0].parity == Parity::odd);
    CHECK(back[0].representation == Representation::diabatic);

    LifetimeRow a;
    a.V = 1.5275;
    a.nu = 2;
    a.W = 2.3;
    a.method = Method::nad_BW;
    a.tau = 1234.5;
    LifetimeRow f = a;
    f.method = Method::LZ;
    f.tau.reset();
    f.flag("error=x");
    write_atomic(dir / "life.csv", lifetimes_csv({a, f}, "abc"));
    std::string hash;
    const auto rows = read_lifetimes(dir / "life.csv", &hash);
    REQUIRE(rows.size() == 2);
    CHECK(hash == "abc");
    CHECK(rows[0].method == Method::nad_BW);
    CHECK(*rows[0].tau == 1234.5);
    CHECK_FALSE(rows[1].tau);
    CHECK(rows[1].flags == "error=x");
    CHECK(lifetimes_csv(rows, hash) == slurp(dir / "life.csv"));
}

TEST_CASE("sweep output is independent of the worker count and reproduced from the cache") {
    const auto one = scratch("jobs1"), three = scratch("jobs3");
    const auto c1 = small_config(one, 1), c3 = small_config(three, 3);
    const auto r1 = compute_sweep(c1);
    write_outputs(c1, r1);
    const auto r3 = compute_sweep(c3);
    write_outputs(c3, r3);
    CHECK(r1.scans == 4);
    CHECK(r1.cache_hits == 0);
    CHECK(r1.failures == 0);
    CHECK(r1.rows.size() == r1.resonances.size() / 2 * 3);
    for (const char* f : {"resonances.csv", "lifetimes.csv"}) CHECK(slurp(one / f) == slurp(three / f));

    const auto again = compute_sweep(c1);
    CHECK(again.cache_hits == 4);
    CHECK(again.scans == 0);
    write_outputs(c1, again);
    const auto before = slurp(three / "lifetimes.csv");
    CHECK(slurp(one / "lifetimes.csv") == before);

    const auto manifest = nlohmann::json::parse(slurp(one / "manifest.json"));
    CHECK(manifest["config_hash"] == config_hash(c1));
    CHECK(manifest["failures"] == 0);
}

TEST_CASE("command line") {
    const auto dir = scratch("cli");
    write_file(dir / "bad.ini", "[sweep]\nspeed = 3\n");
    write_file(dir / "ok.ini", "[sweep]\nV = 2.4\nwindow = 0.5\nmethods = ad_FC,LZ\nout = " + (dir / "out").string() + "\n");
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("lifetimes --config " + (dir / "bad.ini").string()) == 2);
    CHECK(run_cli("lifetimes --v 1.0 --methods bogus --out " + (dir / "x").string()) == 2);
    CHECK(run_cli("lifetimes --v -1 --out " + (dir / "x").string()) == 2);
    CHECK(run_cli("sweep --config " + (dir / "ok.ini").string()) == 0);
    const auto rows = read_lifetimes(dir / "out" / "lifetimes.csv");
    CHECK(rows.size() == 4);  // two levels, two methods
    for (const auto& r : rows) CHECK(r.tau);

    // unit inputs of one leave lifetimes unchanged
    CHECK(run_cli("convert-units --physical 1,1,2.4,1 --out " + (dir / "out").string()) == 0);
    const auto phys = read_csv(dir / "out" / "lifetimes_physical.csv");
    REQUIRE(phys.size() == 5);
    CHECK(phys[0].back() == "tau_phys");
    for (std::size_t i = 1; i < phys.size(); ++i) CHECK(std::stod(phys[i][12]) == doctest::Approx(std::stod(phys[i][5])));
    CHECK(run_cli("convert-units --out " + (dir / "out").string()) == 2);
}
