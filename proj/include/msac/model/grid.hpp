#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "msac/error.hpp"

namespace msac::model {

/// Uniform grid on [-x_max, x_max] with a node at x = 0.
///
/// x_max is snapped to a whole number of steps, so the point count is
/// always 2 * half_count() + 1. Index center() is x = 0.
class Grid {
public:
    Grid() = default;

    Grid(double x_max, double dx) : dx_(dx) {
        if (!(x_max > 0.0)) throw DomainError("Grid: x_max must be positive");
        if (!(dx > 0.0)) throw DomainError("Grid: dx must be positive");
        half_ = static_cast<std::size_t>(std::llround(x_max / dx));
        if (half_ < 2) throw DomainError("Grid: x_max must span at least two steps");
    }

    [[nodiscard]] double dx() const noexcept { return dx_; }
    [[nodiscard]] double x_max() const noexcept { return static_cast<double>(half_) * dx_; }
    [[nodiscard]] std::size_t half_count() const noexcept { return half_; }
    [[nodiscard]] std::size_t size() const noexcept { return 2 * half_ + 1; }
    [[nodiscard]] std::size_t center() const noexcept { return half_; }

    [[nodiscard]] double x(std::size_t i) const noexcept {
        return (static_cast<double>(i) - static_cast<double>(half_)) * dx_;
    }

    /// Nearest index for position x, clamped to the grid.
    [[nodiscard]] std::size_t index_of(double x) const noexcept {
        const double k = std::round(x / dx_) + static_cast<double>(half_);
        if (k <= 0.0) return 0;
        if (k >= static_cast<double>(size() - 1)) return size() - 1;
        return static_cast<std::size_t>(k);
    }

    [[nodiscard]] std::vector<double> points() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
        return out;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    double dx_ = 1e-3;
    std::size_t half_ = 0;
};

}  // namespace msac::model
