#include "upfn/mc.hpp"

#include <algorithm>
#include <cmath>

#include "upfn/parallel.hpp"
#include "upfn/quadrature.hpp"

namespace upfn {

// ---------------------------------------------------------------------------
// Incomplete beta by the Lentz continued fraction (Numerical Recipes shape).

namespace {

double betacf(double a, double b, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= eps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta: a, b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double binomial_upper_bound(long k, long R, double level) {
    if (R < 1 || k < 0 || k > R) throw std::domain_error("binomial_upper_bound: bad counts");
    if (!(level > 0.0) || !(level < 1.0))
        throw std::domain_error("binomial_upper_bound: level must lie in (0,1)");
    if (k == R) return 1.0;
    // p solves I_p(k+1, R-k) = level.
    const double a = static_cast<double>(k) + 1.0;
    const double b = static_cast<double>(R - k);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < level)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

ExceedanceReport verify_inequality(
    const std::function<double(long, RngStream&)>& sampler, double threshold,
    double theory, long R, double level, std::uint64_t seed, std::uint64_t experiment,
    int threads) {
    if (R < 100) throw std::domain_error("verify_inequality: need at least 100 replications");
    std::vector<double> values(static_cast<std::size_t>(R));
    run_indexed(
        static_cast<std::size_t>(R),
        [&](std::size_t i) {
            RngStream rng(seed, experiment, static_cast<std::uint64_t>(i));
            values[i] = sampler(static_cast<long>(i), rng);
        },
        threads);
    long k = 0;
    for (double v : values)
        if (v > threshold) ++k;

    ExceedanceReport rep;
    rep.replications = R;
    rep.exceedances = k;
    rep.level = level;
    rep.upper_bound = binomial_upper_bound(k, R, level);
    rep.raw_theory = theory;
    rep.theory = std::min(1.0, theory);
    rep.vacuous = theory >= 1.0;
    rep.pass = rep.upper_bound <= rep.theory;
    return rep;
}

MomentReport moment_report(const std::function<double(long, RngStream&)>& sampler,
                           double threshold, double q, long R, double theory, double level,
                           std::uint64_t seed, std::uint64_t experiment, int threads,
                           int bootstrap) {
    if (!(q >= 1.0)) throw std::domain_error("moment_report: q must be >= 1");
    if (R < 1000) throw std::domain_error("moment_report: need at least 1000 replications");
    std::vector<double> excess(static_cast<std::size_t>(R));
    run_indexed(
        static_cast<std::size_t>(R),
        [&](std::size_t i) {
            RngStream rng(seed, experiment, static_cast<std::uint64_t>(i));
            excess[i] = std::pow(pos(sampler(static_cast<long>(i), rng) - threshold), q);
        },
        threads);

    MomentReport rep;
    rep.replications = R;
    rep.q = q;
    rep.level = level;
    rep.estimate = pairwise_sum(excess) / static_cast<double>(R);
    rep.theory = theory;

    // Percentile bootstrap for the upper confidence end.
    std::vector<double> means(static_cast<std::size_t>(bootstrap));
    RngStream boot(seed, experiment ^ 0x626f6f74ull, 0);
    for (int bb = 0; bb < bootstrap; ++bb) {
        double acc = 0.0;
        for (long i = 0; i < R; ++i)
            acc += excess[static_cast<std::size_t>(boot.next_u64() % static_cast<std::uint64_t>(R))];
        means[static_cast<std::size_t>(bb)] = acc / static_cast<double>(R);
    }
    std::sort(means.begin(), means.end());
    const std::size_t idx = std::min(
        means.size() - 1, static_cast<std::size_t>(std::ceil(level * bootstrap)) );
    rep.ci_upper = means[idx];
    rep.pass = rep.ci_upper <= theory;
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<double> simulate_ou(const std::vector<double>& t, double sigma, double lambda,
                                RngStream& rng) {
    if (t.empty()) return {};
    if (!(sigma > 0.0) || !(lambda > 0.0))
        throw std::domain_error("simulate_ou: sigma, lambda must be > 0");
    const double var = sq(sigma) / (2.0 * lambda);
    std::vector<double> x(t.size());
    x[0] = std::sqrt(var) * rng.normal();
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double dt = t[i] - t[i - 1];
        if (!(dt >= 0.0)) throw std::domain_error("simulate_ou: grid must be sorted");
        const double phi = std::exp(-lambda * dt);
        x[i] = phi * x[i - 1] + std::sqrt(var * (1.0 - phi * phi)) * rng.normal();
    }
    return x;
}

GaussianGridSampler::GaussianGridSampler(std::vector<std::vector<double>> covariance) {
    if (covariance.size() > 4096)
        throw std::domain_error("GaussianGridSampler: grid limited to 4096 points");
    n_ = static_cast<int>(covariance.size());
    const std::size_t n = covariance.size();
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += covariance[i][i];
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        chol_.assign(n * n, 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = covariance[i][j] + (i == j ? jitter : 0.0);
                for (std::size_t p = 0; p < j; ++p) s -= chol_[i * n + p] * chol_[j * n + p];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    chol_[i * n + i] = std::sqrt(s);
                } else {
                    chol_[i * n + j] = s / chol_[j * n + j];
                }
            }
        }
        if (ok) return;
        jitter = jitter == 0.0 ? 1e-12 * std::max(trace / static_cast<double>(n), 1.0)
                               : jitter * 10.0;
        if (jitter > 1e-5 * std::max(trace / static_cast<double>(n), 1.0)) break;
    }
    throw numeric_guard_error("GaussianGridSampler: covariance not positive definite");
}

std::vector<double> GaussianGridSampler::sample(RngStream& rng) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    std::vector<double> z(n), x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += chol_[i * n + j] * z[j];
        x[i] = s;
    }
    return x;
}

GaussianGridSampler fbm_sampler(const std::vector<double>& t, double alpha) {
    if (!(alpha > 0.0) || alpha > 2.0)
        throw std::domain_error("fbm_sampler: exponent must lie in (0,2]");
    const std::size_t n = t.size();
    std::vector<std::vector<double>> cov(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cov[i][j] = 0.5 * (std::pow(t[i], alpha) + std::pow(t[j], alpha) -
                               std::pow(std::abs(t[i] - t[j]), alpha));
    return GaussianGridSampler(std::move(cov));
}

GaussianGridSampler levy_sampler(const std::vector<std::vector<double>>& pts) {
    const std::size_t n = pts.size();
    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    std::vector<std::vector<double>> cov(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> diff(pts[i].size());
            for (std::size_t l = 0; l < diff.size(); ++l) diff[l] = pts[i][l] - pts[j][l];
            cov[i][j] = 0.5 * (norm(pts[i]) + norm(pts[j]) - norm(diff));
        }
    return GaussianGridSampler(std::move(cov));
}

// ---------------------------------------------------------------------------

std::vector<double> simulate_white_noise_field(const std::vector<double>& t_grid, double h,
                                               const std::function<double(double)>& K,
                                               double mesh, double lo, double hi,
                                               RngStream& rng) {
    if (!(h > 0.0)) throw std::domain_error("simulate_white_noise_field: h must be > 0");
    if (!(mesh <= h / 8.0))
        throw std::domain_error(
            "simulate_white_noise_field: mesh coarser than h/8 (discretisation bias)");
    const long cells = static_cast<long>(std::ceil((hi - lo) / mesh));
    std::vector<double> w(static_cast<std::size_t>(cells));
    const double sd = std::sqrt(mesh);
    for (long i = 0; i < cells; ++i) w[static_cast<std::size_t>(i)] = sd * rng.normal();

    std::vector<double> out(t_grid.size(), 0.0);
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        const double t = t_grid[ti];
        // Kernel support is [-1/2, 1/2], so only cells within h/2 contribute.
        const long i0 = std::max<long>(0, static_cast<long>((t - 0.5 * h - lo) / mesh) - 1);
        const long i1 = std::min<long>(cells - 1, static_cast<long>((t + 0.5 * h - lo) / mesh) + 1);
        double acc = 0.0;
        for (long i = i0; i <= i1; ++i) {
            const double u = lo + (static_cast<double>(i) + 0.5) * mesh;
            acc += K((t - u) / h) * w[static_cast<std::size_t>(i)];
        }
        out[ti] = acc / h;
    }
    return out;
}

double lp_norm_grid(const std::vector<double>& values, const std::vector<double>& t_grid,
                    double p) {
    if (values.size() != t_grid.size() || values.size() < 2)
        throw std::domain_error("lp_norm_grid: bad grid");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double dt = t_grid[i + 1] - t_grid[i];
        acc += 0.5 * dt * (std::pow(std::abs(values[i]), p) +
                           std::pow(std::abs(values[i + 1]), p));
    }
    return std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> kde_centering(const KdeProcessSpec& spec) {
    std::vector<std::vector<double>> c(spec.h.size(), std::vector<double>(spec.x.size()));
    for (std::size_t hi = 0; hi < spec.h.size(); ++hi) {
        const double h = spec.h[hi];
        for (std::size_t xi = 0; xi < spec.x.size(); ++xi) {
            const double x = spec.x[xi];
            const double a = std::max(spec.f.lo, x - h);
            const double b = std::min(spec.f.hi, x + h);
            c[hi][xi] = a < b ? integrate(
                                    [&](double u) {
                                        return spec.K1((u - x) / h) / h * spec.f.pdf(u);
                                    },
                                    a, b, 1e-10)
                              : 0.0;
        }
    }
    return c;
}

std::vector<std::vector<double>> simulate_kde_process(
    const KdeProcessSpec& spec, const std::vector<std::vector<double>>& centering,
    RngStream& rng) {
    std::vector<double> sample(static_cast<std::size_t>(spec.n));
    for (auto& s : sample) s = spec.draw(rng);
    std::vector<std::vector<double>> xi(spec.h.size(), std::vector<double>(spec.x.size()));
    for (std::size_t hi = 0; hi < spec.h.size(); ++hi) {
        const double h = spec.h[hi];
        for (std::size_t xj = 0; xj < spec.x.size(); ++xj) {
            const double x = spec.x[xj];
            double acc = 0.0;
            for (double s : sample) {
                const double u = (s - x) / h;
                if (std::abs(u) <= 1.0) acc += spec.K1(u) / h;
            }
            xi[hi][xj] = acc / static_cast<double>(spec.n) - centering[hi][xj];
        }
    }
    return xi;
}

// ---------------------------------------------------------------------------

double lil_tracker_max(const KdeLilTrackerSpec& spec,
                       const std::vector<std::vector<double>>& centering, RngStream& rng) {
    if (spec.j_start < 3 || spec.n_max > 64 * spec.j_start)
        throw std::domain_error("lil_tracker_max: need j >= 3 and n_max <= 64 j");
    double best = 0.0;
    std::vector<double> running(spec.h.size(), 0.0);  // sum of K_h(X_i - xbar)
    for (long n = 1; n <= spec.n_max; ++n) {
        const double xv = spec.draw(rng);
        for (std::size_t hi = 0; hi < spec.h.size(); ++hi) {
            const double u = (xv - spec.xbar) / spec.h[hi];
            if (std::abs(u) <= 1.0) running[hi] += spec.K1(u) / spec.h[hi];
        }
        if (n < spec.j_start) continue;
        const double nd = static_cast<double>(n);
        const double norm = std::sqrt(std::log1p(std::log(nd)));
        const double cap = nd * std::pow(std::log(nd), -spec.a);  // admissible G values
        for (std::size_t hi = 0; hi < spec.h.size(); ++hi) {
            const double g = spec.K_sup / spec.h[hi];
            if (g > cap) continue;
            const double xi = running[hi] / nd - centering[hi][0];
            const double stat = std::sqrt(nd) * std::abs(xi) / (std::sqrt(g) * norm);
            best = std::max(best, stat);
        }
    }
    return best;
}

double ll_tracker_max(const KdeLlTrackerSpec& spec,
                      const std::vector<std::vector<double>>& centering, RngStream& rng) {
    if (spec.j_start < 3 || spec.n_max > 64 * spec.j_start)
        throw std::domain_error("ll_tracker_max: need j >= 3 and n_max <= 64 j");
    double best = 0.0;
    std::vector<std::vector<double>> running(spec.r.size(),
                                             std::vector<double>(spec.xbar.size(), 0.0));
    for (long n = 1; n <= spec.n_max; ++n) {
        const double xv = spec.draw(rng);
        for (std::size_t ri = 0; ri < spec.r.size(); ++ri)
            for (std::size_t xj = 0; xj < spec.xbar.size(); ++xj) {
                const double u = (xv - spec.xbar[xj]) / spec.r[ri];
                if (std::abs(u) <= 1.0) running[ri][xj] += spec.K1(u) / spec.r[ri];
            }
        if (n < spec.j_start) continue;
        const double nd = static_cast<double>(n);
        const double lll = std::log(std::log(nd));
        for (std::size_t ri = 0; ri < spec.r.size(); ++ri) {
            const double vr = spec.r[ri];
            if (vr * nd < std::pow(std::log(nd), spec.a)) continue;  // admissibility
            double sup = 0.0;
            for (std::size_t xj = 0; xj < spec.xbar.size(); ++xj)
                sup = std::max(sup,
                               std::abs(running[ri][xj] / nd - centering[ri][xj]));
            const double den = std::sqrt(std::max(std::log(1.0 / vr), lll));
            if (den > 0.0) best = std::max(best, std::sqrt(nd * vr) * sup / den);
        }
    }
    return best;
}

}  // namespace upfn
