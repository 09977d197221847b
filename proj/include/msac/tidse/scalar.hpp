#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "msac/error.hpp"
#include "msac/wave.hpp"

namespace msac::tidse {

/// Single-channel equation psi'' = 2 (U(x) - E) psi on x >= 0, with U
/// tabulated at half steps for RK4.
class ScalarSystem {
public:
    ScalarSystem(const std::function<double(double)>& potential, double dx, double x_end) : dx_(dx) {
        if (!(dx > 0.0) || !(x_end > dx)) throw DomainError("ScalarSystem: bad step or range");
        nodes_ = static_cast<std::size_t>(std::llround(x_end / dx)) + 1;
        u_.resize(2 * nodes_ + 1);
        for (std::size_t j = 0; j < u_.size(); ++j) u_[j] = potential(0.5 * dx * static_cast<double>(j));
    }

    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return nodes_; }
    [[nodiscard]] double potential_at_node(std::size_t i) const noexcept { return u_[2 * i]; }

    /// (psi, psi') at x = 0 .. n_end dx starting from the parity condition
    /// psi(0) = 1, psi'(0) = 0 (even) or psi(0) = 0, psi'(0) = 1 (odd).
    /// Values are rescaled in place if they grow past 1e100; `rescales`
    /// counts those events so callers needing absolute values can refuse.
    [[nodiscard]] std::vector<std::array<double, 2>> integrate(double E, Parity parity, std::size_t n_end,
                                                               int* rescales = nullptr) const {
        if (n_end + 1 > nodes_) throw RangeError("ScalarSystem: range exceeds potential table");
        std::vector<std::array<double, 2>> y(n_end + 1);
        y[0] = parity == Parity::even ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
        const double h = dx_;
        int count = 0;
        for (std::size_t i = 0; i < n_end; ++i) {
            const double u0 = 2.0 * (u_[2 * i] - E);
            const double u1 = 2.0 * (u_[2 * i + 1] - E);
            const double u2 = 2.0 * (u_[2 * i + 2] - E);
            const auto [p, q] = y[i];
            const double k1p = q, k1q = u0 * p;
            const double k2p = q + 0.5 * h * k1q, k2q = u1 * (p + 0.5 * h * k1p);
            const double k3p = q + 0.5 * h * k2q, k3q = u1 * (p + 0.5 * h * k2p);
            const double k4p = q + h * k3q, k4q = u2 * (p + h * k3p);
            y[i + 1] = {p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
                        q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)};
            if (std::abs(y[i + 1][0]) > 1e100) {
                for (std::size_t j = 0; j <= i + 1; ++j) {
                    y[j][0] *= 1e-100;
                    y[j][1] *= 1e-100;
                }
                ++count;
            }
        }
        if (rescales) *rescales = count;
        return y;
    }

    /// Sign changes of psi on (0, n_end dx].
    [[nodiscard]] int count_nodes(double E, Parity parity, std::size_t n_end) const {
        const auto y = integrate(E, parity, n_end);
        int nodes = 0;
        for (std::size_t i = 1; i + 1 < y.size(); ++i)
            if (y[i][0] * y[i + 1][0] < 0.0) ++nodes;
        return nodes;
    }

private:
    double dx_;
    std::size_t nodes_ = 0;
    std::vector<double> u_;
};

}  // namespace msac::tidse
