#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "msac/approx/fgr.hpp"
#include "msac/approx/lz.hpp"
#include "msac/stationary/methods.hpp"
#include "msac/tidse/resonance.hpp"

using namespace msac;

TEST_CASE("Landau-Zener lifetime from harmonic level estimates") {
    // V = 1: W_0 = 1.25, W_1 = 1.75, reflected W_-1 = 0.75.
    const auto r = approx::lz_lifetime(1.0, std::vector<double>{1.25, 1.75}, 0);
    CHECK(r.reflected_lower);
    CHECK_FALSE(r.reflected_upper);
    CHECK(r.R == doctest::Approx(1.0 / std::numbers::pi));
    CHECK(r.v == doctest::Approx(std::sqrt(2.5)));
    CHECK(r.P_LZ == doctest::Approx(0.01879).epsilon(1e-3));
    CHECK(r.tau == doctest::Approx(167.2).epsilon(1e-3));

    const auto top = approx::lz_lifetime(1.0, std::vector<double>{1.25, 1.75}, 1);
    CHECK(top.reflected_upper);
    CHECK(top.R == doctest::Approx(1.0 / std::numbers::pi));

    CHECK_THROWS_AS(approx::lz_lifetime(1.0, 1.75, 1.5, 1.25), DomainError);
    CHECK_THROWS_AS(approx::lz_lifetime(1.0, std::vector<double>{1.25}, 0), RangeError);
}

TEST_CASE("property: Landau-Zener probability and its exponential sensitivity") {
    for (double V : {0.306, 1.0, 2.75}) {
        for (double W : {V + 0.2, V + 1.0, V + 3.5}) {
            const auto r = approx::lz_lifetime(V, W - 0.3, W, W + 0.3);
            CHECK(r.P_LZ > 0.0);
            CHECK(r.P_LZ < 1.0);
            CHECK(r.tau == doctest::Approx(1.0 / (r.R * r.P_LZ)));
            // d ln tau / d V^2 = 2 pi / v at fixed energies
            const double h = 1e-4;
            const double Vp = std::sqrt(V * V + h), Vm = std::sqrt(V * V - h);
            const double d = (std::log(approx::lz_lifetime(Vp, W - 0.3, W, W + 0.3).tau) -
                              std::log(approx::lz_lifetime(Vm, W - 0.3, W, W + 0.3).tau)) /
                             (2.0 * h);
            CHECK(d == doctest::Approx(2.0 * std::numbers::pi / r.v).epsilon(1e-7));
        }
    }
    CHECK(approx::crossing_velocity(1.0, 2.0, approx::VelocityRule::W_minus_V) == doctest::Approx(1.0));
    CHECK_THROWS_AS(approx::crossing_velocity(1.0, 0.5, approx::VelocityRule::two_W_minus_V), DomainError);
}

TEST_CASE("quality factor") {
    CHECK(approx::q_factor(2.0 * std::sqrt(1.7), 1.7) == doctest::Approx(1.0));
    CHECK_THROWS_AS(approx::q_factor(0.0, 1.0), DomainError);
}

TEST_CASE("continuum state: parity, asymptotic amplitude and energy normalisation") {
    const double V = 1.0, W = 2.0, dx = 1e-3, X = 40.0;
    for (Parity p : {Parity::even, Parity::odd}) {
        const auto c = approx::fgr_continuum_state(V, W, p, dx, X);
        if (p == Parity::even) {
            CHECK(c.dpsi[0] == 0.0);
        } else {
            CHECK(c.psi[0] == 0.0);
        }
        // amplitude against (1/sqrt(pi)) (x + 2W)^(-1/4) beyond x_l + 5
        const double x0 = stationary::turning_point(V, W) + 5.0;
        double worst = 0.0;
        for (auto i = static_cast<std::size_t>(x0 / dx); i < c.psi.size() - 1; i += 97) {
            const double x = static_cast<double>(i) * dx;
            const double k = approx::lower_wave_number(x, V, W);
            const double dk = (approx::lower_wave_number(x + 1e-4, V, W) - approx::lower_wave_number(x - 1e-4, V, W)) / 2e-4;
            const double a = tidse::wkb_amplitude(c.psi[i], c.dpsi[i], k, dk);
            worst = std::max(worst, std::abs(a / approx::asymptotic_amplitude(x, W) - 1.0));
        }
        CHECK(worst < 0.01);
    }

    // On [-X, X], <psi_W'|psi_W> ~ sin(dW T) / (pi dW) with T = int_0^X dx / k,
    // the finite-range form of delta(W - W').
    const auto base = approx::fgr_continuum_state(V, W, Parity::even, dx, X);
    std::vector<double> inv_k(base.psi.size());
    for (std::size_t i = 0; i < inv_k.size(); ++i) inv_k[i] = 1.0 / approx::lower_wave_number(i * dx, V, W);
    const double T = numerics::simpson(inv_k, dx);
    auto overlap = [&](double dW) {
        const auto o = approx::fgr_continuum_state(V, W + dW, Parity::even, dx, X);
        std::vector<double> f(base.psi.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = base.psi[i] * o.psi[i];
        return 2.0 * numerics::simpson(f, dx);
    };
    const double diag = overlap(0.0);
    CHECK(diag == doctest::Approx(T / std::numbers::pi).epsilon(0.03));
    // half a period: 1/(pi dW) = 2T/pi^2; full period: suppressed
    CHECK(overlap(0.5 * std::numbers::pi / T) == doctest::Approx(2.0 * T / (std::numbers::pi * std::numbers::pi)).epsilon(0.05));
    CHECK(std::abs(overlap(std::numbers::pi / T)) < 0.05 * diag);
}

TEST_CASE("FGR matrix element: parity rule and cumulative integral") {
    approx::FgrOptions o;
    const auto r = approx::fgr_at_step(1.5275, 2, 2e-3, o);
    const auto& d = r.densities;
    REQUIRE(d.M_cum.size() == d.x.size());
    const std::size_t mid = (d.x.size() - 1) / 2;
    CHECK(d.x[mid] == 0.0);
    CHECK(r.M == doctest::Approx(2.0 * d.M_cum[mid]).epsilon(1e-3));
    CHECK(d.M_cum.back() == doctest::Approx(r.M).epsilon(1e-3));
    for (std::size_t j = 0; j < mid; j += 101) CHECK(d.m_Sigma[j] == doctest::Approx(d.m_Sigma[d.x.size() - 1 - j]));

    // same-parity continuum: the integrand is odd and M vanishes
    tidse::ClosedChannelOptions copt;
    copt.dx = 2e-3;
    const tidse::ClosedChannel cc(1.5275, 1.5275 + 2.0, copt);
    const auto bound = cc.level(2);
    const auto same = approx::fgr_continuum_state(1.5275, bound.E, bound.parity, 2e-3, cc.x_end());
    approx::FgrDensities sd;
    CHECK(approx::matrix_element(bound, same, &sd) == 0.0);
    CHECK(std::abs(sd.M_cum.back()) < 1e-6 * std::abs(r.M));
}

TEST_CASE("FGR levels and lifetimes against the coupled resonances") {
    const double V = 1.5275;
    const auto recs = tidse::scan_resonances(V, Representation::adiabatic);
    const tidse::Shooter sh(Representation::adiabatic, V, tidse::ResonanceOptions{}.shooting);
    for (int nu : {0, 3, 7}) {
        const auto f = approx::fgr_lifetime(V, nu);
        const auto& r = recs[static_cast<std::size_t>(nu)];
        CHECK(f.W_fgr <= r.W);
        CHECK(r.W - f.W_fgr < 0.07);
        CHECK(f.last_change < 5e-3);
        const double ratio = f.tau / stationary::flux_lifetime(sh, r).tau;
        MESSAGE("nu=" << nu << " FGR/FC " << ratio);
        CHECK(ratio >= 0.65);
        CHECK(ratio <= 1.05);
    }
}

TEST_CASE("FGR bound level in the harmonic limit and m_A dominance") {
    const auto g = approx::fgr_at_step(2.75, 0, 1e-3, {});
    CHECK(g.W_fgr - 2.75 == doctest::Approx(0.25 / std::sqrt(2.75)).epsilon(0.05));
    for (double V : {0.306, 2.75}) {
        const auto r = approx::fgr_at_step(V, 3, 1e-3, {});
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < r.densities.x.size(); ++j) {
            a += std::abs(r.densities.m_A[j]);
            b += std::abs(r.densities.m_B[j]);
        }
        MESSAGE("V=" << V << " <|m_A|>/<|m_B|> = " << a / b);
        CHECK(a > 3.0 * b);
    }
}
