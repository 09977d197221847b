#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "msac/error.hpp"

namespace msac::numerics {

/// Three abscissae a < b < c with f(b) <= min(f(a), f(c)).
struct Bracket {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double fa = 0.0;
    double fb = 0.0;
    double fc = 0.0;
};

struct Minimum {
    double x = 0.0;
    double f = 0.0;
    int evaluations = 0;
};

/// Grow [a, b] downhill by golden steps until it encloses a minimum.
template <class F>
Bracket expand_bracket(F&& f, double a, double b, int max_steps = 200) {
    constexpr double grow = std::numbers::phi;
    double fa = f(a);
    double fb = f(b);
    if (fb > fa) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = b + grow * (b - a);
    double fc = f(c);
    for (int i = 0; i < max_steps && fc < fb; ++i) {
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        c = b + grow * (b - a);
        fc = f(c);
    }
    if (fc < fb) throw ConvergenceError("expand_bracket: no minimum found after expansion");
    if (a > c) {
        std::swap(a, c);
        std::swap(fa, fc);
    }
    return {a, b, c, fa, fb, fc};
}

/// Golden-section search inside a bracket. Stops once the bracket is
/// narrower than abs_tol + rel_tol * |x| or stops shrinking in floating point.
template <class F>
Minimum golden_section(F&& f, const Bracket& br, double abs_tol,
                       double rel_tol = 4.0 * std::numeric_limits<double>::epsilon(), int max_iter = 400) {
    constexpr double R = 2.0 - std::numbers::phi;  // 0.381966...
    constexpr double C = 1.0 - R;
    double x0 = br.a;
    double x3 = br.c;
    double x1 = 0.0;
    double x2 = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    int evals = 0;
    if (std::abs(br.c - br.b) > std::abs(br.b - br.a)) {
        x1 = br.b;
        f1 = br.fb;
        x2 = br.b + R * (br.c - br.b);
        f2 = f(x2);
    } else {
        x2 = br.b;
        f2 = br.fb;
        x1 = br.b - R * (br.b - br.a);
        f1 = f(x1);
    }
    ++evals;
    for (int it = 0; it < max_iter; ++it) {
        const double tol = abs_tol + rel_tol * 0.5 * (std::abs(x1) + std::abs(x2));
        if (std::abs(x3 - x0) <= tol) break;
        if (f2 < f1) {
            const double next = C * x2 + R * x3;
            if (next == x2) break;
            x0 = x1;
            x1 = x2;
            x2 = next;
            f1 = f2;
            f2 = f(x2);
        } else {
            const double next = C * x1 + R * x0;
            if (next == x1) break;
            x3 = x2;
            x2 = x1;
            x1 = next;
            f2 = f1;
            f1 = f(x1);
        }
        ++evals;
    }
    return f1 < f2 ? Minimum{x1, f1, evals} : Minimum{x2, f2, evals};
}

/// Brent minimization on [lo, hi] (parabolic steps with golden fallback),
/// to a relative tolerance of 2^(1 - bits). Boost caps bits at half the
/// mantissa, so the abscissa is only good to ~1e-8 relative.
template <class F>
Minimum brent_minimize(F&& f, double lo, double hi, int bits = 50, std::uintmax_t max_iter = 500) {
    std::uintmax_t iters = max_iter;
    int evals = 0;
    auto counted = [&](double x) {
        ++evals;
        return f(x);
    };
    const auto [x, fx] = boost::math::tools::brent_find_minima(counted, lo, hi, bits, iters);
    if (iters >= max_iter) throw ConvergenceError("brent_minimize: iteration limit reached");
    return {x, fx, evals};
}

/// Three-point parabolic vertex iteration with a shrinking stencil, for
/// objectives that are close to quadratic in x on the scale of d. The
/// stencil shrinks by `shrink` per accepted step down to min_d.
template <class F>
Minimum parabolic_polish(F&& f, double x, double d, double min_d, double shrink = 32.0, int max_iter = 60) {
    Minimum best{x, f(x), 1};
    for (int it = 0; it < max_iter; ++it) {
        const double fm = f(best.x - d);
        const double fp = f(best.x + d);
        best.evaluations += 2;
        const double curv = fm - 2.0 * best.f + fp;
        if (!(curv > 0.0)) break;
        const double step = 0.5 * d * (fm - fp) / curv;
        const double clipped = std::clamp(step, -2.0 * d, 2.0 * d);
        const double x_new = best.x + clipped;
        const double f_new = f(x_new);
        ++best.evaluations;
        if (f_new <= best.f) {
            best.x = x_new;
            best.f = f_new;
        }
        if (clipped != step) continue;
        if (d <= min_d) break;
        d = std::max(d / shrink, min_d);
    }
    return best;
}

}  // namespace msac::numerics
