#include "upfn/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "upfn/cover.hpp"

namespace upfn {

double entropy_doubling_ball(double n_d, double r, double delta) {
    if (!(n_d >= 1.0) || !(r > 0.0) || !(delta > 0.0))
        throw std::domain_error("entropy_doubling_ball: arguments must be positive, n_d >= 1");
    return std::log(n_d) * (pos(std::log2(r / delta)) + 1.0);
}

double entropy_log_hyperrectangle(int k, double t, double s) {
    if (k < 1) throw std::domain_error("entropy_log_hyperrectangle: k must be >= 1");
    if (!(t >= 1.0)) throw std::domain_error("entropy_log_hyperrectangle: t must be >= 1");
    if (!(s > 0.0)) throw std::domain_error("entropy_log_hyperrectangle: scale must be > 0");
    return k * (std::log1p(std::log(t)) + pos(1.0 + std::log(2.0 / s)));
}

EntropyProvider EntropyProvider::zero() { return EntropyProvider(); }

EntropyProvider EntropyProvider::doubling_ball(double n_d, double radius) {
    if (!(n_d >= 1.0) || !(radius > 0.0))
        throw std::domain_error("EntropyProvider::doubling_ball: bad parameters");
    EntropyProvider p;
    p.fn_ = [n_d, radius](double delta) {
        if (delta >= radius) return 0.0;  // one ball centred at the centre covers
        return entropy_doubling_ball(n_d, radius, delta);
    };
    p.diameter_ = 2.0 * radius;
    return p;
}

EntropyProvider EntropyProvider::log_hyperrectangle(int k, double t) {
    if (k < 1 || !(t >= 1.0))
        throw std::domain_error("EntropyProvider::log_hyperrectangle: bad parameters");
    EntropyProvider p;
    const double diam = std::log(t);
    p.fn_ = [k, t, diam](double delta) {
        if (delta >= diam) return 0.0;
        return entropy_log_hyperrectangle(k, t, delta);
    };
    p.diameter_ = diam;
    return p;
}

EntropyProvider EntropyProvider::closed_form(std::function<double(double)> fn, double diameter) {
    EntropyProvider p;
    p.fn_ = [fn, diameter](double delta) {
        if (delta >= diameter) return 0.0;
        return std::max(0.0, fn(delta));
    };
    p.diameter_ = diameter;
    return p;
}

EntropyProvider EntropyProvider::greedy_finite(const std::vector<int>& points,
                                               const Metric& dist) {
    EntropyProvider p;
    if (points.empty() || points.size() == 1) return zero();

    double diam = 0.0, min_pos = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const double d = dist(points[i], points[j]);
            diam = std::max(diam, d);
            if (d > 0.0) min_pos = std::min(min_pos, d);
        }
    if (diam == 0.0) return zero();
    if (!std::isfinite(min_pos)) min_pos = diam;

    // Greedy counts on a fixed dyadic radius ladder.  A cover at a smaller
    // radius is also a cover at any larger one, so taking the least count over
    // ladder radii <= delta yields a monotone, deterministic entropy bound.
    std::vector<double> radii;
    std::vector<double> counts;
    for (double r = min_pos / 2.0; r < diam; r *= std::sqrt(2.0))
        radii.push_back(r);
    radii.push_back(diam);
    double best = static_cast<double>(points.size());
    for (double r : radii) {
        best = std::min(best, static_cast<double>(covering_number_greedy(points, dist, r).count));
        counts.push_back(best);
    }

    const double n_all = static_cast<double>(points.size());
    p.fn_ = [radii, counts, diam, n_all](double delta) {
        if (!(delta > 0.0)) throw std::domain_error("entropy: delta must be > 0");
        if (delta >= diam) return 0.0;
        const auto it = std::upper_bound(radii.begin(), radii.end(), delta);
        if (it == radii.begin()) return std::log(n_all);
        const std::size_t idx = static_cast<std::size_t>(it - radii.begin()) - 1;
        return std::log(counts[idx]);
    };
    p.diameter_ = diam;
    return p;
}

}  // namespace upfn
