#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "msac/error.hpp"
#include "msac/model/adiabatic.hpp"
#include "msac/numerics/quadrature.hpp"
#include "msac/stationary/bounds.hpp"
#include "msac/tidse/scalar.hpp"
#include "msac/wave.hpp"

namespace msac::tidse {

/// Bound state of -1/2 d^2/dx^2 + V~_u(x) alone (off-diagonal A and B
/// couplings dropped), sampled on x = 0 .. (psi.size()-1) dx and normalised
/// over the full line. Beyond the cut point the state is set to zero.
struct ClosedLevel {
    int nu = 0;
    Parity parity = Parity::even;
    double V = 0.0;
    double E = 0.0;
    double dx = 0.0;
    std::vector<double> psi;
    std::vector<double> dpsi;

    [[nodiscard]] double value(std::size_t i) const noexcept { return i < psi.size() ? psi[i] : 0.0; }
};

struct ClosedChannelOptions {
    double dx = 1e-3;
    /// Semiclassical decay exponent covered past the highest turning point.
    double tail_exponent = 20.0;
    double energy_tol = 1e-13;
};

/// Closed-channel spectrum of V~_u for one V, below E_max.
class ClosedChannel {
public:
    ClosedChannel(double V, double E_max, ClosedChannelOptions opt = {})
        : V_(V), E_max_(E_max), opt_(opt),
          x_end_(stationary::norm_boundary(V, E_max, opt.tail_exponent)),
          sys_([V](double x) { return model::adiabatic_point(x, V).Vt_u; }, opt.dx, x_end_ + opt.dx),
          n_end_(static_cast<std::size_t>(std::llround(x_end_ / opt.dx))) {
        if (!(E_max > V)) throw DomainError("ClosedChannel: E_max must exceed V");
    }

    [[nodiscard]] double V() const noexcept { return V_; }
    [[nodiscard]] double x_end() const noexcept { return x_end_; }

    /// Number of levels of one parity below E.
    [[nodiscard]] int count_below(double E, Parity parity) const { return sys_.count_nodes(E, parity, n_end_); }

    /// Number of levels (both parities) below E_max.
    [[nodiscard]] int level_count() const {
        return count_below(E_max_, Parity::even) + count_below(E_max_, Parity::odd);
    }

    /// Level nu (even parity for even nu), by bisection on the node count.
    [[nodiscard]] ClosedLevel level(int nu) const {
        if (nu < 0) throw DomainError("ClosedChannel: nu must be non-negative");
        const Parity parity = nu % 2 == 0 ? Parity::even : Parity::odd;
        const int k = nu / 2;
        if (count_below(E_max_, parity) <= k) throw RangeError("ClosedChannel: level above E_max");
        return bisect(nu, V_, E_max_);
    }

    /// Level nu searched inside [lo, hi]; falls back to the full range when
    /// the bracket does not hold exactly that level.
    [[nodiscard]] ClosedLevel level(int nu, double lo, double hi) const {
        if (nu < 0) throw DomainError("ClosedChannel: nu must be non-negative");
        const Parity parity = nu % 2 == 0 ? Parity::even : Parity::odd;
        const int k = nu / 2;
        lo = std::max(lo, V_);
        hi = std::min(hi, E_max_);
        if (hi > lo && count_below(lo, parity) <= k && count_below(hi, parity) > k) return bisect(nu, lo, hi);
        return level(nu);
    }

    [[nodiscard]] std::vector<ClosedLevel> levels() const {
        std::vector<ClosedLevel> out;
        const int n = level_count();
        for (int nu = 0; nu < n; ++nu) out.push_back(level(nu));
        return out;
    }

private:
    [[nodiscard]] ClosedLevel bisect(int nu, double lo, double hi) const {
        const Parity parity = nu % 2 == 0 ? Parity::even : Parity::odd;
        const int k = nu / 2;
        while (hi - lo > opt_.energy_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (count_below(mid, parity) > k ? hi : lo) = mid;
        }
        ClosedLevel out;
        out.nu = nu;
        out.parity = parity;
        out.V = V_;
        out.E = 0.5 * (lo + hi);
        out.dx = opt_.dx;
        shape(out);
        return out;
    }

    /// Integrate at the eigenvalue and cut where the decaying tail meets
    /// the growing residue: the |psi| minimum past the turning point.
    void shape(ClosedLevel& lev) const {
        int rescales = 0;
        auto y = sys_.integrate(lev.E, lev.parity, n_end_, &rescales);
        const double xl = stationary::turning_point(V_, lev.E);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(xl / opt_.dx) + 1, n_end_);
        std::size_t cut = i;
        for (; i <= n_end_; ++i)
            if (std::abs(y[i][0]) < std::abs(y[cut][0])) cut = i;
        lev.psi.resize(cut + 1);
        lev.dpsi.resize(cut + 1);
        std::vector<double> dens(cut + 1);
        for (std::size_t j = 0; j <= cut; ++j) {
            lev.psi[j] = y[j][0];
            lev.dpsi[j] = y[j][1];
            dens[j] = y[j][0] * y[j][0];
        }
        const double norm = 2.0 * numerics::simpson(dens, opt_.dx);
        double c = 1.0 / std::sqrt(norm);
        // Positive at the origin (even) or positive slope there (odd).
        if ((lev.parity == Parity::even ? lev.psi[0] : lev.dpsi[0]) < 0.0) c = -c;
        for (std::size_t j = 0; j <= cut; ++j) {
            lev.psi[j] *= c;
            lev.dpsi[j] *= c;
        }
    }

    double V_;
    double E_max_;
    ClosedChannelOptions opt_;
    double x_end_;
    ScalarSystem sys_;
    std::size_t n_end_;
};

}  // namespace msac::tidse
