#include <cmath>
#include <numbers>
#include <vector>

#include "airy_oracle.hpp"
#include "doctest.h"
#include "msac/stationary/methods.hpp"
#include "msac/tidse/resonance.hpp"

using namespace msac;

namespace {

constexpr double kV = 1.5275;

const std::vector<tidse::ResonanceRecord>& levels(Representation rep) {
    static const auto ad = tidse::scan_resonances(kV, Representation::adiabatic);
    static const auto dia = tidse::scan_resonances(kV, Representation::diabatic);
    return rep == Representation::adiabatic ? ad : dia;
}

tidse::Shooter shooter(Representation rep) { return tidse::Shooter(rep, kV, tidse::ResonanceOptions{}.shooting); }

// pi-periodic distance between two phases
double phase_distance(double a, double b) {
    const double d = std::remainder(a - b, std::numbers::pi);
    return std::abs(d);
}

}  // namespace

TEST_CASE("three-point fit is exact for a sinusoid and predicts a fourth sample of a tail") {
    SUBCASE("pure sinusoid") {
        const double dx = 0.01, k = 4.3, a = 0.7, ph = 1.1;
        std::vector<double> f;
        for (int i = 0; i < 5; ++i) f.push_back(a * std::cos(k * (1.0 + i * dx) + ph));
        const auto fit = stationary::fit_three_point(f, 2, 1.0 + 2 * dx, dx);
        CHECK(fit.oscillatory);
        CHECK(fit.k == doctest::Approx(k).epsilon(1e-9));
        CHECK(fit.a == doctest::Approx(a).epsilon(1e-9));
        CHECK(fit(1.0 + 4 * dx) == doctest::Approx(f[4]).epsilon(1e-9));
    }
    SUBCASE("allowed tail of a resonance wave") {
        const auto& r = levels(Representation::diabatic)[3];
        const auto w = stationary::resonance_wave(shooter(Representation::diabatic), r);
        const auto fit = stationary::tail_fit(w, 0, w.grid.x_max() - 1.0);
        const std::size_t j = fit.index + 2;
        CHECK(std::abs(fit(w.grid.x(j)) - w.psi[0][j]) < 1e-4 * fit.a);
    }
}

TEST_CASE("property: flux lifetime is invariant under rescaling of the wave") {
    for (Representation rep : {Representation::adiabatic, Representation::diabatic}) {
        const auto& r = levels(rep)[1];
        auto w = stationary::resonance_wave(shooter(rep), r);
        const double tau = stationary::lifetime_flux(w).tau;
        for (auto& c : w.psi)
            for (double& v : c) v *= -37.5;
        CHECK(stationary::lifetime_flux(w).tau == doctest::Approx(tau).epsilon(1e-12));
    }
}

TEST_CASE("norm boundary lies r_k decay lengths past the turning point") {
    for (double W : {1.8, 3.0, 4.9}) {
        const double xl = stationary::turning_point(kV, W);
        CHECK(model::upper_potential(xl, kV) == doctest::Approx(W).epsilon(1e-12));
        const double xk = stationary::norm_boundary(kV, W, 3.0);
        // independent midpoint quadrature of kappa = sqrt(2 (V_u - W))
        const int n = 200000;
        const double h = (xk - xl) / n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += std::sqrt(2.0 * (model::upper_potential(xl + (i + 0.5) * h, kV) - W)) * h;
        CHECK(acc == doctest::Approx(3.0).epsilon(1e-4));
    }
}

TEST_CASE("property: flux lifetime is insensitive to r_k and the fit point") {
    for (Representation rep : {Representation::adiabatic, Representation::diabatic}) {
        const auto sh = shooter(rep);
        for (std::size_t k : {0u, 5u, 11u}) {
            const auto& r = levels(rep)[k];
            const auto w = stationary::resonance_wave(sh, r);
            const double base = stationary::lifetime_flux(w).tau;
            stationary::FluxOptions deeper;
            deeper.r_k = 4.0;
            CHECK(std::abs(stationary::lifetime_flux(w, deeper).tau / base - 1.0) < 0.01);
            stationary::FluxOptions inner;
            inner.fit_offset = 2.0;
            CHECK(std::abs(stationary::lifetime_flux(w, inner).tau / base - 1.0) < 0.01);
        }
    }
}

TEST_CASE("Breit-Wigner lifetime agrees with flux and is insensitive to x_B") {
    const auto sh = shooter(Representation::adiabatic);
    for (std::size_t k : {0u, 4u, 9u}) {
        const auto& r = levels(Representation::adiabatic)[k];
        const auto flux = stationary::flux_lifetime(sh, r);
        const auto bw = stationary::bw_lifetime(sh, r, flux.gamma);
        CHECK(std::abs(bw.tau / flux.tau - 1.0) < 0.02);
        CHECK_FALSE(bw.background_flag);
        stationary::BreitWignerOptions o;
        o.x_B_offset = 2.0;
        CHECK(std::abs(stationary::bw_lifetime(sh, r, flux.gamma, o).tau / bw.tau - 1.0) < 0.01);
    }
}

TEST_CASE("decoupled scattering phase matches the Airy solution") {
    // V = 0, diabatic: psi_2 must be the decaying Ai(x - 2W), which fixes the
    // slope at the origin; psi_1 is then a known Airy combination.
    tidse::ShootingOptions opt;
    opt.x_max.fixed = 12.0;
    const tidse::Shooter sh(Representation::diabatic, 0.0, opt);
    const double x_end = 12.0, x_B = 11.0;
    for (Parity parity : {Parity::even, Parity::odd}) {
        for (double W : {0.7, 1.6, 2.9}) {
            const auto t = stationary::tail_sample(sh, parity, W, x_end, x_B);
            const auto a0 = oracle::airy(-2.0 * W);
            const double sign = parity == Parity::even ? 1.0 : -1.0;
            const double s = sign * a0.aip / a0.ai;
            const double psi1_slope = parity == Parity::even ? -s : s;
            const auto [p, q] = oracle::airy_combination(-2.0 * W, 1.0, -psi1_slope);
            const auto aB = oracle::airy(-(x_B + 2.0 * W));
            const double psi = p * aB.ai + q * aB.bi;
            const double dpsi = -(p * aB.aip + q * aB.bip);
            const double k = std::sqrt(x_B + 2.0 * W);
            const double expected = stationary::local_phase(psi, dpsi, k, 1.0 / (2.0 * k));
            CHECK(t.k == doctest::Approx(k).epsilon(1e-12));
            CHECK(phase_distance(stationary::local_phase(t.psi, t.dpsi, t.k, t.dk), expected) < 1e-4);
        }
    }
}

TEST_CASE("property: phase rises by pi across each resonance") {
    const auto sh = shooter(Representation::adiabatic);
    const auto& recs = levels(Representation::adiabatic);
    std::vector<double> widths;
    for (const auto& r : recs) widths.push_back(stationary::flux_lifetime(sh, r).gamma);
    for (Parity parity : {Parity::even, Parity::odd}) {
        const auto scan = stationary::phase_scan(sh, recs, widths, parity);
        REQUIRE(scan.step.size() == 6);
        for (std::size_t m = 0; m < scan.step.size(); ++m) {
            INFO("nu = " << scan.nu[m]);
            CHECK(std::abs(scan.step[m] / std::numbers::pi - 1.0) <= 0.1);
        }
    }
}

TEST_CASE("phase curve tracks branches and rejects unresolved jumps") {
    // Synthetic tail psi = cos S, psi' = -k sin S with k' = 0, so the local
    // phase is S mod pi; S = phi0 + extra(W).
    const double V = 1.0, x_B = 10.0;
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(2.0 + 0.01 * i);
    auto sampler = [&](auto extra) {
        return [=](double W) {
            const double S = stationary::background_phase(Representation::adiabatic, V, W, x_B) + extra(W);
            const double k = 3.0;
            return stationary::TailSample{std::cos(S), -k * std::sin(S), k, 0.0};
        };
    };
    // a smooth rise of pi over the grid is followed exactly
    const auto c = stationary::phase_curve(Representation::adiabatic, Parity::even, V, grid, x_B,
                                           sampler([](double W) { return std::numbers::pi * (W - 2.0) / 0.4; }));
    CHECK(c.relative(40) - c.relative(0) == doctest::Approx(std::numbers::pi).epsilon(1e-9));
    // a one-sample jump of 1.2 rad is ambiguous
    CHECK_THROWS_AS(stationary::phase_curve(Representation::adiabatic, Parity::even, V, grid, x_B,
                                            sampler([](double W) { return W > 2.2 ? 1.2 : 0.0; })),
                    ResolutionError);
}
