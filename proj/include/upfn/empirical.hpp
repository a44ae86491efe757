#pragma once

#include <functional>
#include <string>
#include <vector>

#include "upfn/common.hpp"

namespace upfn {

// ---------------------------------------------------------------------------
// One-dimensional density with bounded support (quadrature-friendly).
struct Density {
    std::function<double(double)> pdf;
    double lo = 0.0, hi = 1.0;
    double f_sup = 1.0;  // sup of the density
};

// Bernstein-form variance/sup quantities of a generalized empirical process at
// one index value and one index pair.
struct BernsteinResult {
    double A2 = 0;     // 2 n^{-2} sum_i E G^2
    double B_inf = 0;  // (4/3) n^{-1} sup_x |G|
    double a = 0;      // increment L2 semi-metric
    double b_inf = 0;  // increment sup semi-metric
    bool used_mc = false;
};

using GFun = std::function<double(double)>;  // x -> G(h, x), h fixed

BernsteinResult bernstein_quantities(const GFun& g1, const GFun& g2, const Density& f, long n);

// ---------------------------------------------------------------------------
// The explicit constants behind the bounded-family envelopes.
struct EmpiricalConstants {
    double delta_star = 0;
    double C1 = 0, C2 = 0;  // level-set capacity constants (a- and b-side)
    double a_b = 0;
    double C_NRmk = 0;      // C1 + C2 + 2 chi a_b
    double C_D = 0;
    double c_b = 0;
    double lambda1 = 0, lambda2 = 0;
    double C_Db = 0;
    int chi = 0;
    double b = 2.0;         // scale exponent, > 1
    double N = 1, R = 1;
    int m = 1, k = 1;

    double c_q(double q) const;  // moment-bound constant
};

// Modulus entry for one coordinate: D continuous increasing with D(0) = 0, its
// derivative on [0,1], and the growth map L.
struct ModulusSpec {
    std::function<double(double)> D;
    std::function<double(double)> D_prime;  // empty -> central differences
    std::function<double(double)> L;
};

double delta_star_root();

EmpiricalConstants structural_constants(double N, double R, int m, int k, double b, int chi,
                                        const std::vector<ModulusSpec>& moduli);

// ---------------------------------------------------------------------------
// Envelopes over a finite family of evaluation points.
struct HPoint {
    std::vector<double> h;  // the first-k coordinate block
    double g_inf = 1.0;     // envelope value G_inf(h^{(k)})
    double F = 1.0;         // first-absolute-moment quantity F_{n2}
};

struct BoundedFamilyEnvelopes {
    std::vector<double> P, M;      // uniformity prices per point
    std::vector<double> F_trunc;   // max(F, e^{-r})
    std::vector<double> extra;     // 2 ln(1+|ln F_trunc|)
    std::vector<double> g_inf;
    double lambda1 = 0, lambda2 = 0, beta_exp = 0;
    double u = 0, q = 0;
    double prob_bound = 0, moment_bound = 0;

    double V(std::size_t i, double n) const;
    double U(std::size_t i, double n) const;
};

// 3 <= n1 <= n2 < 2 n1; r_trunc may be +infinity (no truncation).
BoundedFamilyEnvelopes bounded_family_envelopes(
    const EmpiricalConstants& ec, const std::vector<HPoint>& pts, double G_low,
    double F_sup, long n1, long n2, double r_trunc, double u, double q,
    const std::function<double(double)>& Lk);

// ---------------------------------------------------------------------------
// Non-asymptotic iterated-logarithm constant, assembled from explicit sups
// over the sample-size range (derived constant).
struct LilParams {
    double a = 3.0;       // restriction exponent, > 2
    double c_frak = 1.0;  // c <= G_low(n) <= G_up(n) <= c n^{b_frak}
    double b_frak = 1.0;
    double F_big = 1.0;   // sup of the F quantity
    double a_frak = 0.0;  // coefficient of the coordinate-map growth term
};

struct LilConstant {
    double upsilon = 0;
    double u1 = 0, u2 = 0, u3 = 0;  // the assembled sups
    double bound(double j) const { return 2419.0 / std::log(j); }
};

// ec must be built with chi = 1 and a scale exponent b in (1, a/2).
LilConstant lil_constant(const EmpiricalConstants& ec, const LilParams& p);

// ---------------------------------------------------------------------------
// Partially-bounded-family envelopes (cover-based) and their simplified
// fixed-n variants.
struct PartialCoverEnvelopes {
    std::vector<double> mass;             // neighbourhood masses per point
    std::vector<double> P, M;             // base prices
    std::vector<double> F_trunc, F_hat, extra, g_inf;
    double lambda1 = 0, lambda2 = 0, beta_exp = 0;
    double v = 1, z = 1, q = 1;
    double prob_bound = 0, moment_bound = 0;

    double L(std::size_t i, double n) const;  // 0 <= L <= v ln n
    double V_tilde(std::size_t i, double n) const;
    double U_tilde(std::size_t i, double n) const;
    double V_hat(std::size_t i, double n) const;
    double U_hat(std::size_t i, double n) const;
};

// -ln(mass v n^{-v}), clamped into [0, v ln n].
double neighbourhood_log_mass(double mass, double n, double v);

PartialCoverEnvelopes partial_cover_envelopes(
    const EmpiricalConstants& ec, const std::vector<HPoint>& pts,
    const std::vector<double>& neighbourhood_mass, double G_low, double G_up, double F_sup,
    long n1, long n2, double n_overlap, double v, double z, double q,
    const std::function<double(double)>& Lk,
    double r_trunc = std::numeric_limits<double>::infinity());

// ---------------------------------------------------------------------------
// Kernel-localized family: G(h, x) = g(z, x) K_r(distances(x, xbar)).
struct KernelLocalizedModel {
    int d = 1;
    std::function<double(const std::vector<double>&)> K;  // R^d -> R
    double K_sup = 1.0;
    double L1 = 1.0;                 // ratio-Lipschitz constant of K
    double g_sup = 1.0;
    double L_alpha = 0.0;            // Hoelder constant of g in z
    double alpha = 1.0;              // Hoelder exponent, in (0,1]
    std::vector<double> gamma;       // volume exponents per coordinate
    double L2 = 0.0;                 // kernel tail-decay constant
    std::vector<double> L_meas;      // ball-measure constants per coordinate
    double f_sup = 1.0;              // marginal density bound
};

struct LocalizedAssembly {
    int d = 1;
    bool pointwise = true;           // single centre: the trailing growth map vanishes
    double gamma_min = 1.0;
    std::vector<double> gamma;
    double gK = 1.0;                 // g_sup * K_sup
    std::function<double(double)> D0, D0_prime;
    std::function<double(double)> Lk;  // coordinate-map growth term
    double F_bound = 0.0;            // uniform bound on the F quantity
    std::vector<ModulusSpec> moduli;  // D0 then the trailing coordinates

    double volume(const std::vector<double>& r) const;
    double G_inf(const std::vector<double>& r) const;  // gK / V_r
    // max_l gamma_l |ln r_l - ln r'_l|
    double rho_band(const std::vector<double>& r, const std::vector<double>& rp) const;
};

// Verifies the ratio-Lipschitz property of K on deterministic test pairs and
// assembles the localized model maps; throws with a witness pair on failure.
LocalizedAssembly localized_model(const KernelLocalizedModel& km, bool pointwise);

// F quantity for d = 1 by quadrature: g_sup int |K((x-xbar)/r)|/r f(x) dx.
double localized_F(const KernelLocalizedModel& km, const Density& f, double r, double xbar);

// Largest value of (prod_l t_l^{1+gamma_l}) sup_{|u| outside the t-box} |K(u)|
// over a t-grid, relative to the declared decay constant L2 (d = 1 path).
// A return above 1 means the declared L2 is too small.
double kernel_tail_check(const KernelLocalizedModel& km, double t_max = 64.0);

// ---------------------------------------------------------------------------
// Pointwise localized envelopes over a bandwidth grid.
struct LocalizedEnvelopes {
    std::vector<double> P, M;
    std::vector<double> F_trunc, extra;
    std::vector<double> volume;
    double lam1 = 0, lam2 = 0;  // sqrt(gK) lambda1, gK lambda2
    double beta_exp = 0;
    double u = 0, q = 0;
    double prob_bound = 0, moment_bound = 0;

    double V(std::size_t i, double n) const;
    double U(std::size_t i, double n) const;
};

LocalizedEnvelopes localized_pointwise_envelopes(
    const EmpiricalConstants& ec, const LocalizedAssembly& la,
    const std::vector<std::vector<double>>& r_grid, const std::vector<double>& F_values,
    const std::vector<double>& r_max, long n1, long n2, double r_trunc, double u, double q);

// Sup-norm variant over (r, xbar) with a lattice cover.
struct SupnormEnvelopes {
    std::vector<double> M_hat;   // per bandwidth point
    std::vector<double> F_hat;
    std::vector<double> volume;
    double lam1 = 0, lam2 = 0, beta_exp = 0;
    double v = 1, z = 1, q = 1;
    double C_big = 0;
    double prob_bound = 0, moment_bound = 0;

    double U_hat(std::size_t i, double n) const;
};

SupnormEnvelopes localized_supnorm_envelopes(
    const EmpiricalConstants& ec, const LocalizedAssembly& la,
    const std::vector<std::vector<double>>& r_grid, const std::vector<double>& F_values,
    const std::vector<double>& r_max, const std::vector<double>& r_min, long n1, long n2,
    double n_overlap, double v, double z, double q);

// ---------------------------------------------------------------------------
// Lattice cover of R^d by sup-norm balls B_{rsep/2}(rsep * i).
struct CoverRd {
    int d = 1;
    double r_sep = 1.0;
    double n_overlap = 3.0;  // 3^d

    // Per-axis interval of the neighbourhood of x (cells containing x plus
    // their intersecting cells).
    std::pair<double, double> neighbourhood_axis(double x) const;
};

CoverRd lattice_cover(int d, double r_sep);

struct SupportCheck {
    bool ok = true;
    double worst_ratio = 0.0;  // max over the grid of n |K(u/r)| / K_sup
    std::vector<double> witness_u;
    double witness_n = 0.0;
};

// sup_{r in the range} sup_{|u| outside (0,t]^d} |K(u/r)| <= K_sup / n.
SupportCheck support_check(const KernelLocalizedModel& km,
                           const std::function<std::vector<double>(long)>& r_max_of_n,
                           double t_frak, long n_lo, long n_hi);

// ---------------------------------------------------------------------------
// Law-of-logarithm constant for the sup-norm statistic (derived constant).
struct LlParams {
    double a = 5.0;       // > 4
    double c_frak = 1.0;  // G = c_frak / V
    double b_frak = 1.0;  // G_up(n) <= c_frak n^{b_frak}
    double F_big = 1.0;
    std::function<double(double)> Lk;  // empty -> zero map
};

// ec must be built with chi = 1 and a scale exponent b in (1, a/2 - 1).
double ll_constant(const EmpiricalConstants& ec, const LlParams& p);

}  // namespace upfn
