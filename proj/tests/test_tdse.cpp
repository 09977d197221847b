#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "msac/stationary/methods.hpp"
#include "msac/tdse/decay.hpp"
#include "msac/tidse/resonance.hpp"

using namespace msac;
using tdse::cplx;
using tdse::Pair;

namespace {

// Gaussian packet in both components with mean momentum p0.
ComplexWave packet(Representation rep, double V, double x_max, double dx, double x0, double p0, double W = 0.0) {
    ComplexWave w;
    w.grid = model::Grid(x_max, dx);
    w.representation = rep;
    w.V = V;
    w.W = W;
    for (auto& c : w.psi) c.assign(w.grid.size(), cplx{});
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double x = w.grid.x(i);
        const cplx g = std::exp(-(x - x0) * (x - x0)) * std::exp(cplx(0.0, p0 * x));
        w.psi[0][i] = g;
        w.psi[1][i] = 0.5 * g;
    }
    w.scale(1.0 / std::sqrt(w.norm()));
    return w;
}

cplx inner(const std::vector<Pair>& a, const std::vector<Pair>& b) {
    cplx acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i].u) * b[i].u + std::conj(a[i].v) * b[i].v;
    return acc;
}

}  // namespace

TEST_CASE("property: Crank-Nicolson is unitary without an absorber") {
    for (Representation rep : {Representation::diabatic, Representation::adiabatic}) {
        for (bool coupled : {false, true}) {
            const auto w = packet(rep, 0.9, 10.0, 0.02, -1.0, 1.5);
            const std::vector<double> eta(w.size(), 0.0);
            tdse::CrankNicolson cn(tdse::make_hamiltonian(rep, w.V, w.grid, 0.0, coupled), eta, 0.01);
            auto psi = tdse::to_pairs(w);
            const double P0 = tdse::norm(psi, w.grid.dx());
            for (int s = 0; s < 10000; ++s) cn.step(psi);
            CHECK(std::abs(tdse::norm(psi, w.grid.dx()) - P0) < 1e-9);
        }
    }
}

TEST_CASE("property: the adiabatic Hamiltonian matrix is symmetric") {
    const model::Grid g(4.0, 0.05);
    const auto h = tdse::make_hamiltonian(Representation::adiabatic, 0.7, g, 0.3);
    const std::vector<double> eta(g.size(), 0.0);
    const tdse::CrankNicolson cn(h, eta, 0.1);
    std::mt19937 rng(7);
    std::normal_distribution<double> n;
    std::vector<Pair> a(g.size()), b(g.size()), ha, hb;
    for (std::size_t i = 0; i < g.size(); ++i) {
        a[i] = {n(rng), n(rng)};
        b[i] = {n(rng), n(rng)};
    }
    cn.apply_hamiltonian(a, ha);
    cn.apply_hamiltonian(b, hb);
    CHECK(std::abs(inner(a, hb) - inner(ha, b)) < 1e-9 * std::abs(inner(a, hb)));
}

TEST_CASE("Crank-Nicolson step solves the implicit equation") {
    const auto w = packet(Representation::adiabatic, 1.2, 8.0, 0.02, 0.5, -2.0);
    const tdse::Absorber ab{5.0, 3.0, 8.0};
    std::vector<double> eta(w.size());
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = ab.eta(w.grid.x(i));
    const double dt = 0.05;
    tdse::CrankNicolson cn(tdse::make_hamiltonian(w.representation, w.V, w.grid, 0.4), eta, dt);
    const auto before = tdse::to_pairs(w);
    auto after = before;
    cn.step(after);
    std::vector<Pair> hb, ha;
    cn.apply_hamiltonian(before, hb);
    cn.apply_hamiltonian(after, ha);
    const cplx i_half(0.0, 0.5 * dt);
    double worst = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        auto side = [&](const Pair& p, const Pair& hp, double sign) {
            return Pair{p.u + sign * (i_half * hp.u + 0.5 * dt * eta[k] * p.u),
                        p.v + sign * (i_half * hp.v + 0.5 * dt * eta[k] * p.v)};
        };
        const Pair l = side(after[k], ha[k], 1.0), r = side(before[k], hb[k], -1.0);
        worst = std::max({worst, std::abs(l.u - r.u), std::abs(l.v - r.v)});
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("property: norm loss equals the absorbed flux") {
    // A packet running into the layer loses norm exactly at 2 int eta |psi|^2.
    const auto w = packet(Representation::diabatic, 0.5, 12.0, 0.02, 3.0, 3.0);
    const tdse::Absorber ab{7.0, 5.0, 12.0};
    tdse::PropagationOptions o;
    o.dt = 0.01;
    o.T_end = 6.0;
    o.record_every = 10;
    o.stop_norm = 0.0;
    const auto tr = tdse::propagate(w, ab, o);
    CHECK(tr.P.back() < 0.9);
    CHECK(tr.loss_mismatch < 1e-3);
    for (std::size_t i = 1; i < tr.P.size(); ++i) CHECK(tr.P[i] <= tr.P[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("absorber profile") {
    const tdse::Absorber ab{10.0, 20.0, 16.0};
    CHECK(ab.eta(9.9) == 0.0);
    CHECK(ab.eta(10.0) == doctest::Approx(0.0));
    CHECK(ab.eta(16.0) == doctest::Approx(20.0));
    CHECK(ab.eta(-13.0) == ab.eta(13.0));
    CHECK(ab.eta(13.0) == doctest::Approx(10.0));
    for (double x = 10.0; x < 16.0; x += 0.25) CHECK(ab.eta(x + 0.25) >= ab.eta(x));

    const auto made = tdse::make_absorber(1.5275, 2.5, 14.0);
    CHECK(made.onset == doctest::Approx(stationary::norm_boundary(1.5275, 2.5, 6.0)));
    CHECK(made.x_max >= made.onset + 6.0);
    CHECK(made.strength == 20.0);
    tdse::AbsorberOptions bad;
    bad.strength = -1.0;
    CHECK_THROWS_AS(tdse::make_absorber(1.5275, 2.5, 14.0, bad), DomainError);
    CHECK_FALSE(tdse::no_absorber(10.0).active());
}

TEST_CASE("exponential fit of a norm trace") {
    tdse::NormTrace tr;
    for (int i = 0; i <= 300; ++i) {
        tr.t.push_back(i);
        tr.P.push_back(std::exp(-i / 50.0));
    }
    tdse::lifetime_from_norm(tr);
    CHECK(tr.tau == doctest::Approx(50.0).epsilon(1e-8));
    CHECK(tr.residual < 1e-10);
    CHECK_FALSE(tr.reflection_warning);

    // Linear decay is far from exponential over the window.
    tdse::NormTrace lin;
    for (int i = 0; i <= 300; ++i) {
        lin.t.push_back(i);
        lin.P.push_back(1.0 - i / 310.0);
    }
    CHECK_THROWS_AS(tdse::lifetime_from_norm(lin), PropagationError);

    tdse::NormTrace flat;
    flat.t = {0, 1, 2, 3};
    flat.P = {1, 1, 1, 1};
    CHECK_THROWS_AS(tdse::lifetime_from_norm(flat), PropagationError);
}

TEST_CASE("initial state keeps the bound part of the resonance wave") {
    const double V = 1.5275;
    const auto recs = tidse::scan_resonances(V, Representation::adiabatic, [] {
        tidse::ResonanceOptions o;
        o.window = 1.7;
        return o;
    }());
    REQUIRE(recs.size() >= 5);
    const tidse::Shooter sh(Representation::adiabatic, V, tidse::ResonanceOptions{}.shooting);
    for (std::size_t k = 0; k < 5; ++k) {
        const auto w = stationary::resonance_wave(sh, recs[k]);
        const auto s = tdse::prepare_initial_state(w);
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(s.psi[c].front() == cplx{});
            CHECK(s.psi[c].back() == cplx{});
        }
        // overlap with the bound region of the stationary wave
        const double x_k = stationary::norm_boundary(V, recs[k].W, 3.0);
        const std::size_t lo = w.grid.index_of(-x_k), hi = w.grid.index_of(x_k);
        double ov = 0.0, nw = 0.0;
        for (std::size_t i = lo; i <= hi; ++i)
            for (std::size_t c = 0; c < 2; ++c) {
                ov += w.psi[c][i] * std::real(s.psi[c][i]);
                nw += w.psi[c][i] * w.psi[c][i];
            }
        CHECK(std::abs(ov) * w.grid.dx() / std::sqrt(nw * w.grid.dx()) > 0.99);
    }
}
