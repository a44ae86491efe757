#pragma once

#include <string>

#include "upfn/chaining.hpp"

namespace upfn {

// Zero-mean Gaussian family: c = 2, A = sqrt(2) V, a = sqrt(2) rho, B = b = 0.
TailModel gaussian_tail_model(const std::vector<double>& V, const Metric& rho);

// ---------------------------------------------------------------------------
// L_p norms of smoothed white noise, indexed by the bandwidth h.
struct WienerIntegralModel {
    int d = 1;
    double p = 2.0;       // 2 <= p < infinity
    double gamma = 1.0;   // kernel smoothness, > d/2
    double mu = 1.0;      // integration cube half-width parameter, >= 1
    double h_min = 0.0, h_max = 0.0;  // 0 < h_min <= h_max < 1
    double c0 = 1.0;      // smoothness-class entropy constant (input, assumed)
};

struct WienerLpConstants {
    double alpha = 0;          // min{2/(p-1), 2 - d/gamma}
    double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
    double sup_weight_term = 0;  // sup_{x>=0} 2^{-alpha x} (1+x^2)^4
    double lambda1 = 0;          // scale-coupling factor of the special weight, < 3
    double C1 = 0;               // envelope coefficient: h -> C1 h^{-d/2}
    double c8 = 0, c9 = 0;       // scale-sum constants
    double tail_exponent = 0;    // 2^{-3/2} (h_max)^{-2d/p}
    double C2 = 0;               // probability bound coefficient
    double C3q = 0;              // moment bound coefficient at the requested q
};

WienerLpConstants wiener_lp_pipeline(const WienerIntegralModel& model, double q);

// mu^{d(2-p)/(2p)}: scale factor that turns the p = 2 envelope into one for a
// target exponent p in [1, 2).
double lp_reduction_factor(double mu, int d, double p);

// The special scale-indexed weight used by the pipeline and its coupling
// factor, exposed for verification.
double wiener_weight(double u, double delta, int d, double p);
double wiener_weight_lambda1();  // numeric sup; tight value 1 + (1+sqrt(5))/2

// ---------------------------------------------------------------------------
// Local modulus of continuity on a doubling space with psi(u) ~ u^beta.
struct DoublingModulusModel {
    double n_d = 2.0;             // doubling cover number
    double beta = 0.5;            // modulus exponent
    double c_low = 1.0, c_high = 1.0;  // 0 < c_low <= c_high
    double r = 0.5;               // localisation radius in (0,1)
};

struct DoublingModulusResult {
    double C = 0;      // capacity constant C(beta, c_low, c_high, n_d)
    double z_r = 0;    // ln{1+ln{1+|ln r|}}
    double eps_r = 0;  // 1/z_r
    double a_r = 0;    // normalised envelope threshold
    double p_r = 0;    // tail probability scale
    double bound = 0;  // 8 p_r
};

DoublingModulusResult doubling_modulus_pipeline(const DoublingModulusModel& model);

// C(beta, c_low, c_high, n_d): capacity of the doubling-ball entropy under the
// default weight.  The sup runs over the radii where the one-ball cover stops
// sufficing, mirroring the delta_* convention of the empirical constants.
double doubling_capacity_constant(double beta, double c_low, double c_high, double n_d);

// Intrinsic-metric specialisation (beta = 1, c_low = c_high = sqrt(2)).
double doubling_capacity_intrinsic(double n_d);

// Named processes: "levy" (param1 = dimension), "fbm" (param1 = alpha in
// (0,2]), "ou" (param1 = sigma, param2 = lambda).
DoublingModulusModel example_catalog(const std::string& name, double param1 = 1.0,
                                     double param2 = 1.0);

}  // namespace upfn
