#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "upfn/cover.hpp"
#include "upfn/entropy.hpp"
#include "upfn/weights.hpp"

namespace upfn {

// Tail data for a family of random functionals on a finite index set:
// P{Psi(chi_theta) >= z} <= c exp{-z^2/(A^2 + Bz)} pointwise, and the same
// shape for increments with the semi-metrics a, b.
struct TailModel {
    std::vector<double> A, B;
    Metric a, b;
    double c = 2.0;
    bool b_zero = false;  // B == 0 and b == 0 (sub-gaussian reduction)

    int size() const { return static_cast<int>(A.size()); }
    double A_sup() const;
    double A_inf() const;
    double B_sup() const;
    double B_inf() const;
};

// Spot-checks the semi-metric axioms (symmetry, nonnegativity, triangle
// inequality) of a and b on sampled index triples; throws with the first
// offending triple.
void spot_check_semimetrics(const TailModel& m, int trials = 200,
                            std::uint64_t seed = 0x5eedu);

struct CapacityOptions {
    int j_half_range = 200;  // dyadic grid delta = 2^{j/2}, |j| <= j_half_range
};

// sup_{delta>0} delta^{-p} E(kappa (48 delta)^{-1} s(delta)) on the dyadic
// grid; p = 2 on the a-side, p = 1 on the b-side.  kappa == 0 gives 0.
// Throws numeric_guard_error when the sup sits on the grid boundary after one
// widening (capacity possibly infinite).
double capacity_term(const WeightFunction& s, double kappa, const EntropyProvider& E,
                     int delta_power, const CapacityOptions& opt = {});

double chaining_capacity(const WeightFunction& s1, const WeightFunction& s2,
                         std::pair<double, double> kappa, const EntropyProvider& Ea,
                         const EntropyProvider& Eb, const CapacityOptions& opt = {});

// kappa1 sqrt(2[1+1/eps]^2 e + y) + kappa2 (2[1+1/eps]^2 e + y).
double u_eps_s(double y, std::pair<double, double> kappa, double e, double eps);

// Tail and moment bounds for the supremum at level u_eps_s(y, ...).
double suprema_probability_bound(double c, double eps, double y);
double suprema_moment_bound(double c, double eps, double y, double q, double U);

// ---------------------------------------------------------------------------
// First-type upper functions: envelopes over theta driven by the level sets of
// A and B.  Requires inf A > 0 and (inf B > 0 or the degenerate b == 0 case).
struct FirstTypeResult {
    std::vector<double> V;  // probability envelope per theta
    std::vector<double> U;  // moment envelope per theta
    std::vector<double> P;  // uniformity price (probability)
    std::vector<double> M;  // uniformity price (moments)
    double prob_bound = 0.0;
    double moment_bound = 0.0;
    bool e_overridden = false;
};

struct FirstTypeOptions {
    // Optional replacement for the level-set capacity function E(u, v); any
    // upper bound of it is admissible.
    std::optional<std::function<double(double, double)>> e_override;
    CapacityOptions capacity;
};

FirstTypeResult first_type_envelopes(const TailModel& m, const WeightFunction& s1,
                                     const WeightFunction& s2, double eps, double z,
                                     double q, const FirstTypeOptions& opt = {});

// ---------------------------------------------------------------------------
// Second-type upper functions over a covering family Theta_alpha with scale
// maps tau1, tau2 and increasing envelopes g_A >= sup A, g_B >= sup B on the
// scale-level sets.
struct PartitionFamily {
    int n_alpha = 0;
    std::function<double(int)> tau1, tau2;
    double tau1_bar = 0, tau1_low = 0;
    double tau2_bar = 0, tau2_low = 0;
    std::function<double(double)> g_A, g_B;
    // Scale-indexed weight families s1(u, x), s2(v, x).
    std::function<double(double, double)> s1, s2;
    double lambda1 = 1.0, lambda2 = 1.0;
    // (u, radius) -> entropy of the level set Theta'_1(u) (resp. '2(v)).
    std::function<double(double, double)> entropy1, entropy2;
    bool has_b = true;
    double tail_c = 2.0;
    // Optional R_r family (r, u, v) -> value; empty selects the default
    // log-log family for r = 0 and eps-scaled logarithms for r > 0.
    std::function<double(double, double, double)> R;
    CapacityOptions capacity;
};

struct SecondTypeResult {
    std::vector<double> U_hat;  // envelope per alpha
    double R_sum0 = 0;          // summability constant, r = 0
    double R_sumq = 0;          // summability constant, r = q
    double prob_bound = 0.0;
    double moment_bound = 0.0;
};

SecondTypeResult second_type_envelope(const PartitionFamily& fam, double eps, double z,
                                      double q);

// ---------------------------------------------------------------------------
// Modulus-of-continuity envelopes.  d is the localisation metric, theta0 the
// centre for the local modulus.  When d coincides with the tail metric a and
// b == 0, the envelope takes the simplified single-log form with prefactor
// (1+eps)^3 Delta.
struct ModulusResult {
    std::vector<double> V_hat;  // per Delta
    double prob_bound = 0.0;
};

ModulusResult local_modulus_envelope(const TailModel& m, const Metric& d, int theta0,
                                     const std::vector<double>& delta_grid,
                                     const WeightFunction& s1, const WeightFunction& s2,
                                     double eps, double z, bool d_equals_a = false,
                                     const CapacityOptions& opt = {});

ModulusResult global_modulus_envelope(const TailModel& m, const Metric& d,
                                      const std::vector<double>& delta_grid,
                                      const WeightFunction& s1, const WeightFunction& s2,
                                      double eps, double z, const CapacityOptions& opt = {});

double metric_diameter(int n, const Metric& d);

}  // namespace upfn
