#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace upfn {

// Thrown when a numerical guard trips (divergent sup, non-summable series,
// unstable grid refinement).  The CLI maps this to its own exit code.
class numeric_guard_error : public std::runtime_error {
public:
    explicit numeric_guard_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kSqrt2Minus1 = 0.41421356237309515;

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

inline double sq(double x) { return x * x; }

// ell(u) = ln(1+ln u) + 2 ln(1+ln(1+ln u)),  u >= 1.
inline double ell(double u) {
    if (u < 1.0) throw std::domain_error("ell: argument must be >= 1");
    const double l1 = std::log1p(std::log(u));
    return l1 + 2.0 * std::log1p(l1);
}

inline double gamma_fn(double q) { return std::tgamma(q); }

// Supremum of f over a log-spaced grid with one refinement-stability pass:
// the value must move by less than rel_tol under 2x refinement.
struct GridSup {
    double value = 0.0;
    double argmax = 0.0;
    bool at_boundary = false;
};

inline GridSup log_grid_sup(const std::function<double(double)>& f,
                            double lo, double hi, int n,
                            double rel_tol = 5e-3) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::domain_error("log_grid_sup: bad range");
    auto sweep = [&](int m) {
        GridSup g;
        g.value = -std::numeric_limits<double>::infinity();
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i <= m; ++i) {
            const double x = std::exp(llo + (lhi - llo) * i / m);
            const double v = f(x);
            if (v > g.value) {
                g.value = v;
                g.argmax = x;
                g.at_boundary = (i == 0 || i == m);
            }
        }
        return g;
    };
    GridSup coarse = sweep(n);
    GridSup fine = sweep(2 * n);
    const double scale = std::max(std::abs(coarse.value), std::abs(fine.value));
    if (scale > 0.0 && std::abs(fine.value - coarse.value) > rel_tol * scale)
        throw numeric_guard_error("log_grid_sup: value not stable under grid refinement");
    return fine;
}

// Deterministic pairwise sum; result independent of thread count because the
// inputs are materialised first and reduced in a fixed order.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

}  // namespace upfn
