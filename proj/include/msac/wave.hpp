#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/model/grid.hpp"

namespace msac {

enum class Representation { diabatic, adiabatic };
enum class Parity { even, odd };

constexpr std::string_view to_string(Representation r) noexcept {
    return r == Representation::diabatic ? "diabatic" : "adiabatic";
}
constexpr std::string_view to_string(Parity p) noexcept {
    return p == Parity::even ? "even" : "odd";
}
constexpr Parity opposite(Parity p) noexcept {
    return p == Parity::even ? Parity::odd : Parity::even;
}

/// Component that oscillates (is classically allowed) at large positive x:
/// psi_1 in the diabatic basis, psi_d in the adiabatic basis.
constexpr std::size_t allowed_component(Representation r) noexcept {
    return r == Representation::diabatic ? 0 : 1;
}
constexpr std::size_t forbidden_component(Representation r) noexcept {
    return 1 - allowed_component(r);
}

/// Two-component wave function sampled on a symmetric grid.
///
/// Component order is (psi_1, psi_2) in the diabatic representation and
/// (psi_u, psi_d) in the adiabatic one. Stationary solutions also carry
/// the x-derivatives produced by the integrator.
template <class T>
struct TwoComponentWave {
    model::Grid grid;
    Representation representation = Representation::diabatic;
    Parity parity = Parity::even;
    double V = 1.0;
    double W = 0.0;
    std::array<std::vector<T>, 2> psi;
    std::array<std::vector<T>, 2> dpsi;  ///< empty when not available

    [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
    [[nodiscard]] bool has_derivatives() const noexcept { return !dpsi[0].empty(); }

    [[nodiscard]] std::span<const T> component(std::size_t c) const { return psi.at(c); }

    /// sum_i (|psi_a|^2 + |psi_b|^2) dx over the whole grid.
    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (std::size_t c = 0; c < 2; ++c)
            for (const auto& v : psi[c]) acc += std::norm(v);
        return acc * grid.dx();
    }

    void scale(T factor) {
        for (auto& comp : psi)
            for (auto& v : comp) v *= factor;
        for (auto& comp : dpsi)
            for (auto& v : comp) v *= factor;
    }
};

using RealWave = TwoComponentWave<double>;
using ComplexWave = TwoComponentWave<std::complex<double>>;

/// The same stationary wave expressed in the other representation.
template <class T>
TwoComponentWave<T> change_representation(const TwoComponentWave<T>& in, Representation target) {
    if (in.representation == target) return in;
    const auto dir = target == Representation::adiabatic ? model::Direction::to_adiabatic
                                                          : model::Direction::to_diabatic;
    TwoComponentWave<T> out = in;
    out.representation = target;
    out.dpsi = {};
    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto [a, b] =
            model::basis_transform(std::pair<T, T>{in.psi[0][i], in.psi[1][i]}, dir, in.grid.x(i), in.V);
        out.psi[0][i] = a;
        out.psi[1][i] = b;
    }
    return out;
}

template <class T>
ComplexWave to_complex(const TwoComponentWave<T>& in) {
    ComplexWave out;
    out.grid = in.grid;
    out.representation = in.representation;
    out.parity = in.parity;
    out.V = in.V;
    out.W = in.W;
    for (std::size_t c = 0; c < 2; ++c) {
        out.psi[c].assign(in.psi[c].begin(), in.psi[c].end());
        out.dpsi[c].assign(in.dpsi[c].begin(), in.dpsi[c].end());
    }
    return out;
}

}  // namespace msac
