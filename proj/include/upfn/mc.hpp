#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "upfn/empirical.hpp"
#include "upfn/rng.hpp"

namespace upfn {

// Exact (Clopper-Pearson) one-sided upper confidence bound for a binomial
// proportion; no normal approximation.
double binomial_upper_bound(long k, long R, double level);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

struct ExceedanceReport {
    long replications = 0;
    long exceedances = 0;
    double level = 0.99;
    double upper_bound = 1.0;  // exact binomial upper confidence bound
    double theory = 1.0;       // theoretical bound clamped to 1
    double raw_theory = 1.0;
    bool vacuous = false;      // raw bound >= 1
    bool pass = false;         // upper_bound <= theory
};

// sampler(i, rng) -> statistic for replication i; exceedance when it lands
// strictly above the threshold.
ExceedanceReport verify_inequality(
    const std::function<double(long, RngStream&)>& sampler, double threshold,
    double theory, long R, double level, std::uint64_t seed, std::uint64_t experiment,
    int threads = 0);

struct MomentReport {
    long replications = 0;
    double q = 1.0;
    double estimate = 0.0;
    double ci_upper = 0.0;  // percentile bootstrap
    double theory = 0.0;
    double level = 0.99;
    bool pass = false;
};

MomentReport moment_report(const std::function<double(long, RngStream&)>& sampler,
                           double threshold, double q, long R, double theory, double level,
                           std::uint64_t seed, std::uint64_t experiment, int threads = 0,
                           int bootstrap = 1000);

// ---------------------------------------------------------------------------
// Exact path simulators.

// Stationary Ornstein-Uhlenbeck on a sorted time grid via the autoregressive
// transition; stationary variance sigma^2 / (2 lambda).
std::vector<double> simulate_ou(const std::vector<double>& t, double sigma, double lambda,
                                RngStream& rng);

// Dense lower-triangular Cholesky factor of a covariance matrix, cached for
// repeated sampling.  Small diagonal jitter is escalated a few times before
// giving up.
class GaussianGridSampler {
public:
    GaussianGridSampler() = default;
    explicit GaussianGridSampler(std::vector<std::vector<double>> covariance);
    std::vector<double> sample(RngStream& rng) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<double> chol_;  // packed lower triangle
};

// Increment variance |t-s|^alpha, path pinned at zero for t = 0.
GaussianGridSampler fbm_sampler(const std::vector<double>& t, double alpha);

// Multiparameter analogue with increment variance equal to the distance.
GaussianGridSampler levy_sampler(const std::vector<std::vector<double>>& pts);

// ---------------------------------------------------------------------------
// Smoothed white noise on a one-dimensional grid: values of
// h^{-1} int K((t-u)/h) b(du) discretised with iid N(0, mesh) cell weights.
// Refuses meshes coarser than h/8.
std::vector<double> simulate_white_noise_field(const std::vector<double>& t_grid, double h,
                                               const std::function<double(double)>& K,
                                               double mesh, double lo, double hi,
                                               RngStream& rng);

// Grid L_p norm by the trapezoid rule.
double lp_norm_grid(const std::vector<double>& values, const std::vector<double>& t_grid,
                    double p);

// ---------------------------------------------------------------------------
// Centered kernel process for density data.  K1 must vanish outside [-1, 1];
// the evaluators cut the sums at |(X - x)/h| <= 1.
struct KdeProcessSpec {
    std::vector<double> h;   // bandwidths
    std::vector<double> x;   // evaluation points
    std::function<double(double)> K1;  // scalar kernel on [-1, 1]
    Density f;
    std::function<double(RngStream&)> draw;  // sampler from f
    long n = 0;
};

// E K_h(X - x) per (h, x) by quadrature (tolerance 1e-8 absolute).
std::vector<std::vector<double>> kde_centering(const KdeProcessSpec& spec);

// One replication: the centred field per (h, x).
std::vector<std::vector<double>> simulate_kde_process(
    const KdeProcessSpec& spec, const std::vector<std::vector<double>>& centering,
    RngStream& rng);

// ---------------------------------------------------------------------------
// Single-pass growing-n trackers for the iterated-logarithm statistics.
struct KdeLilTrackerSpec {
    std::vector<double> h;
    double xbar = 0.5;
    std::function<double(double)> K1;
    Density f;
    std::function<double(RngStream&)> draw;
    double K_sup = 1.0;
    double a = 3.0;     // admissibility exponent
    long j_start = 8;
    long n_max = 512;
};

// sup over n in [j_start, n_max] of the normalised pointwise statistic.
double lil_tracker_max(const KdeLilTrackerSpec& spec,
                       const std::vector<std::vector<double>>& centering, RngStream& rng);

struct KdeLlTrackerSpec {
    std::vector<double> r;      // bandwidths (volume = r for unit exponents)
    std::vector<double> xbar;   // centre grid
    std::function<double(double)> K1;
    Density f;
    std::function<double(RngStream&)> draw;
    double a = 5.0;
    long j_start = 8;
    long n_max = 512;
};

// sup over n of sqrt(n V_r) max_xbar |xi| / sqrt(ln(1/V_r) v lnln n).
double ll_tracker_max(const KdeLlTrackerSpec& spec,
                      const std::vector<std::vector<double>>& centering, RngStream& rng);

}  // namespace upfn
