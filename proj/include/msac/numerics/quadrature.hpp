#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace msac::numerics {

/// Composite Simpson rule for uniformly spaced samples. An odd number of
/// intervals is closed with Simpson's 3/8 rule on the last three.
inline double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
    const std::size_t intervals = n - 1;
    std::size_t simpson_end = intervals % 2 == 0 ? n - 1 : n - 4;
    double acc = f[0] + f[simpson_end];
    for (std::size_t i = 1; i < simpson_end; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    double total = acc * h / 3.0;
    if (simpson_end != n - 1) {
        const std::size_t j = simpson_end;
        total += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
    }
    return total;
}

/// Running integral F(x_i) = int_{x_0}^{x_i} f. Each interval uses the
/// parabola through three neighbouring samples (third-order globally).
inline std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n == 2) {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (i + 1 < n) {
            out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        } else {
            out[i] = out[i - 1] + h / 12.0 * (5.0 * f[i] + 8.0 * f[i - 1] - f[i - 2]);
        }
    }
    return out;
}

}  // namespace msac::numerics
