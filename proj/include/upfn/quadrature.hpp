#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace upfn {

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole,
                            double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a,b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, tol, max_depth);
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, b, fa, fm, fb);
    return detail::adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Tensorised adaptive Simpson on [a1,b1] x [a2,b2].
inline double integrate2d(const std::function<double(double, double)>& f,
                          double a1, double b1, double a2, double b2,
                          double tol = 1e-8) {
    return integrate(
        [&](double x) {
            return integrate([&](double y) { return f(x, y); }, a2, b2, tol * 0.1);
        },
        a1, b1, tol);
}

}  // namespace upfn
