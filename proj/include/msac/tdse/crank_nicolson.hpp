#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/model/grid.hpp"
#include "msac/tdse/absorber.hpp"
#include "msac/wave.hpp"

namespace msac::tdse {

using cplx = std::complex<double>;

/// 2x2 block, row-major (a b; c d).
template <class T>
struct Block {
    T a{}, b{}, c{}, d{};
};

template <class T, class U>
inline auto operator*(const Block<T>& m, const Block<U>& n) {
    using R = decltype(T{} * U{});
    return Block<R>{m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

template <class T>
inline Block<T> inverse(const Block<T>& m) {
    const T det = m.a * m.d - m.b * m.c;
    if (det == T{}) throw PropagationError("crank_nicolson: singular block in the elimination");
    return {m.d / det, -m.b / det, -m.c / det, m.a / det};
}

struct Pair {
    cplx u, v;
};

template <class T>
inline Pair mul(const Block<T>& m, const Pair& p) {
    return {m.a * p.u + m.b * p.v, m.c * p.u + m.d * p.v};
}

template <class T>
inline Block<T> transpose(const Block<T>& m) {
    return {m.a, m.c, m.b, m.d};
}

/// Real symmetric block-tridiagonal Hamiltonian (minus an energy offset) on
/// a grid with Dirichlet ends. Site i couples to i+1 through off[i] and
/// to i-1 through off[i-1]^T.
///
/// Diabatic: -1/2 d2 + diag(-x/2, x/2) + V sigma_x.
/// Adiabatic: -1/2 d2 + diag(V~_u, V~_d) with the lower-left operator
/// H_du = B_du + A_du D (D the centred difference) and H_ud = H_du^T, which
/// equals B_ud + A_ud d/dx to second order and keeps H exactly symmetric.
struct BlockHamiltonian {
    std::vector<Block<double>> diag;
    std::vector<Block<double>> off;

    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
};

inline BlockHamiltonian make_hamiltonian(Representation rep, double V, const model::Grid& g, double offset,
                                         bool coupled = true) {
    const std::size_t n = g.size();
    const double dx = g.dx();
    const double kin = 1.0 / (dx * dx);
    BlockHamiltonian h;
    h.diag.resize(n);
    h.off.resize(n - 1);
    std::vector<double> A(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        if (rep == Representation::diabatic) {
            const double c = coupled ? V : 0.0;
            h.diag[i] = {kin - 0.5 * x - offset, c, c, kin + 0.5 * x - offset};
        } else {
            const auto p = model::adiabatic_point(x, V);
            const double c = coupled ? p.B_du : 0.0;
            A[i] = coupled ? p.A_du : 0.0;
            // Row u holds (H_uu, H_ud), row d holds (H_du, H_dd).
            h.diag[i] = {kin + p.Vt_u - offset, c, c, kin + p.Vt_d - offset};
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // (H_du)_{i,i+1} = A_i / 2dx; (H_ud)_{i,i+1} = (H_du)_{i+1,i} = -A_{i+1} / 2dx.
        h.off[i] = {-0.5 * kin, -A[i + 1] / (2.0 * dx), A[i] / (2.0 * dx), -0.5 * kin};
    }
    return h;
}

/// One Crank-Nicolson step (1 + i dt/2 H_abs) psi' = (1 - i dt/2 H_abs) psi
/// with H_abs = H - i eta, solved by block-tridiagonal elimination whose
/// factors are computed once.
class CrankNicolson {
public:
    CrankNicolson(BlockHamiltonian h, std::vector<double> eta, double dt)
        : h_(std::move(h)), eta_(std::move(eta)), dt_(dt) {
        const std::size_t n = h_.size();
        if (n < 2 || eta_.size() != n) throw DomainError("CrankNicolson: inconsistent operator sizes");
        if (!(dt > 0.0)) throw DomainError("CrankNicolson: dt must be positive");
        const cplx ia(0.0, 0.5 * dt);
        auto lhs_diag = [&](std::size_t i) {
            const auto& m = h_.diag[i];
            const double damp = 0.5 * dt * eta_[i];
            return Block<cplx>{1.0 + damp + ia * m.a, ia * m.b, ia * m.c, 1.0 + damp + ia * m.d};
        };
        auto scaled = [&](const Block<double>& m) { return Block<cplx>{ia * m.a, ia * m.b, ia * m.c, ia * m.d}; };
        M_.resize(n);
        G_.resize(n);
        F_.resize(n);
        Block<cplx> Dp = lhs_diag(0);
        G_[0] = inverse(Dp);
        for (std::size_t i = 1; i < n; ++i) {
            const Block<cplx> up = scaled(h_.off[i - 1]);            // A_{i-1,i}
            const Block<cplx> low = scaled(transpose(h_.off[i - 1]));  // A_{i,i-1}
            F_[i - 1] = G_[i - 1] * up;
            M_[i] = low * G_[i - 1];
            const Block<cplx> mu = M_[i] * up;
            Dp = lhs_diag(i);
            Dp.a -= mu.a;
            Dp.b -= mu.b;
            Dp.c -= mu.c;
            Dp.d -= mu.d;
            G_[i] = inverse(Dp);
        }
        work_.resize(n);
    }

    [[nodiscard]] std::size_t size() const noexcept { return h_.size(); }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const std::vector<double>& eta() const noexcept { return eta_; }

    /// H psi (real part of the operator, without the absorber).
    void apply_hamiltonian(const std::vector<Pair>& psi, std::vector<Pair>& out) const {
        const std::size_t n = size();
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            Pair r = mul(h_.diag[i], psi[i]);
            if (i + 1 < n) {
                const Pair t = mul(h_.off[i], psi[i + 1]);
                r.u += t.u;
                r.v += t.v;
            }
            if (i > 0) {
                const Pair t = mul(transpose(h_.off[i - 1]), psi[i - 1]);
                r.u += t.u;
                r.v += t.v;
            }
            out[i] = r;
        }
    }

    /// Advance psi by one step in place.
    void step(std::vector<Pair>& psi) {
        const std::size_t n = size();
        const cplx mia(0.0, -0.5 * dt_);
        // Right-hand side fused with the forward sweep.
        for (std::size_t i = 0; i < n; ++i) {
            Pair hp = mul(h_.diag[i], psi[i]);
            if (i + 1 < n) {
                const Pair t = mul(h_.off[i], psi[i + 1]);
                hp.u += t.u;
                hp.v += t.v;
            }
            if (i > 0) {
                const auto& o = h_.off[i - 1];
                hp.u += o.a * psi[i - 1].u + o.c * psi[i - 1].v;
                hp.v += o.b * psi[i - 1].u + o.d * psi[i - 1].v;
            }
            const double keep = 1.0 - 0.5 * dt_ * eta_[i];
            Pair r{keep * psi[i].u + mia * hp.u, keep * psi[i].v + mia * hp.v};
            if (i > 0) {
                const Pair t = mul(M_[i], work_[i - 1]);
                r.u -= t.u;
                r.v -= t.v;
            }
            work_[i] = r;
        }
        psi[n - 1] = mul(G_[n - 1], work_[n - 1]);
        for (std::size_t i = n - 1; i-- > 0;) {
            const Pair a = mul(G_[i], work_[i]);
            const Pair b = mul(F_[i], psi[i + 1]);
            psi[i] = {a.u - b.u, a.v - b.v};
        }
    }

private:
    BlockHamiltonian h_;
    std::vector<double> eta_;
    double dt_;
    std::vector<Block<cplx>> M_, G_, F_;
    std::vector<Pair> work_;
};

inline std::vector<Pair> to_pairs(const ComplexWave& w) {
    std::vector<Pair> out(w.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {w.psi[0][i], w.psi[1][i]};
    return out;
}

/// sum_i (|u_i|^2 + |v_i|^2) dx
inline double norm(const std::vector<Pair>& psi, double dx) {
    double acc = 0.0;
    for (const auto& p : psi) acc += std::norm(p.u) + std::norm(p.v);
    return acc * dx;
}

/// 2 sum_i eta_i (|u_i|^2 + |v_i|^2) dx: the instantaneous norm loss rate.
inline double absorption_rate(const std::vector<Pair>& psi, const std::vector<double>& eta, double dx) {
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (eta[i] > 0.0) acc += eta[i] * (std::norm(psi[i].u) + std::norm(psi[i].v));
    return 2.0 * acc * dx;
}

}  // namespace msac::tdse
