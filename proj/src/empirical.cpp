#include "upfn/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "upfn/quadrature.hpp"
#include "upfn/rng.hpp"
#include "upfn/weights.hpp"

namespace upfn {

namespace {
constexpr double kSixOverPiSq = 0.6079271018540267;

double sup_abs_on_grid(const std::function<double(double)>& f, double lo, double hi, int n) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        best = std::max(best, std::abs(f(x)));
    }
    return best;
}

}  // namespace

BernsteinResult bernstein_quantities(const GFun& g1, const GFun& g2, const Density& f, long n) {
    if (n < 1) throw std::domain_error("bernstein_quantities: n must be >= 1");
    BernsteinResult r;
    auto expectation = [&](const std::function<double(double)>& integrand) {
        const double coarse = integrate(integrand, f.lo, f.hi, 1e-8);
        const double fine = integrate(integrand, f.lo, f.hi, 1e-11);
        if (std::abs(fine - coarse) > 1e-6 * std::max(1.0, std::abs(fine))) {
            // Quadrature disagreement: fall back to plain Monte Carlo with a
            // fixed stream and flag the result.
            r.used_mc = true;
            RngStream rng(0x5eedu, 0xbe7au, 17);
            const long R = 200000;
            double acc = 0.0;
            for (long i = 0; i < R; ++i) {
                double x = rng.uniform(f.lo, f.hi);
                acc += integrand(x);
            }
            return acc / static_cast<double>(R) * (f.hi - f.lo);
        }
        return fine;
    };

    const double nn = static_cast<double>(n);
    const double eg2 = expectation([&](double x) { return sq(g1(x)) * f.pdf(x); });
    r.A2 = 2.0 / nn * eg2;
    r.B_inf = (4.0 / 3.0) / nn * sup_abs_on_grid(g1, f.lo, f.hi, 20000);
    const double ediff2 =
        expectation([&](double x) { return sq(g1(x) - g2(x)) * f.pdf(x); });
    r.a = std::sqrt(2.0 / nn * ediff2);
    r.b_inf = (4.0 / 3.0) / nn *
              sup_abs_on_grid([&](double x) { return g1(x) - g2(x); }, f.lo, f.hi, 20000);
    return r;
}

// ---------------------------------------------------------------------------

double delta_star_root() {
    // Smallest root of 48 d (1 + ln^2 d) = 6/pi^2; the left side is
    // nondecreasing, so plain bisection in log space suffices.
    auto f = [](double d) { return 48.0 * d * (1.0 + sq(std::log(d))) - kSixOverPiSq; };
    double lo = 1e-12, hi = 1.0;
    for (int i = 0; i < 300; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (f(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return std::sqrt(lo * hi);
}

double EmpiricalConstants::c_q(double q) const {
    return std::pow(2.0, 3.5 * q + 5.0) * std::pow(3.0, q + 4.0) * gamma_fn(q + 1.0) *
           std::pow(C_Db, q);
}

EmpiricalConstants structural_constants(double N, double R, int m, int k, double b, int chi,
                                        const std::vector<ModulusSpec>& moduli) {
    if (!(b > 1.0)) throw std::domain_error("structural_constants: scale exponent must be > 1");
    if (!(N > 0.0) || !(R > 0.0) || m < 1 || k < 0 || k > m)
        throw std::domain_error("structural_constants: bad (N, R, m, k)");
    if (chi != 0 && chi != 1) throw std::domain_error("structural_constants: chi must be 0 or 1");

    EmpiricalConstants ec;
    ec.N = N;
    ec.R = R;
    ec.m = m;
    ec.k = k;
    ec.b = b;
    ec.chi = chi;
    ec.delta_star = delta_star_root();
    const double ds = ec.delta_star;

    const double md = static_cast<double>(m);
    auto sstar = [](double d) { return eval_s_star(d); };

    auto body1 = [&](double d) {
        const double ratio = 9216.0 * md * sq(d) / sq(sstar(d));
        const double ratio2 = 4608.0 * md * R * sq(d) / sq(sstar(d));
        return (k * pos(1.0 + std::log(ratio)) + N * (m - k) * (pos(std::log2(ratio2)) + 1.0)) /
               sq(d);
    };
    auto body2 = [&](double d) {
        const double ratio = 9216.0 * md * d / sstar(d);
        const double ratio2 = 4608.0 * md * R * d / sstar(d);
        return (k * pos(1.0 + std::log(ratio)) + N * (m - k) * (pos(std::log2(ratio2)) + 1.0)) /
               d;
    };
    ec.C1 = std::max(log_grid_sup(body1, ds, ds * 1e10, 6000).value, body1(ds));
    ec.C2 = std::max(log_grid_sup(body2, ds, ds * 1e10, 6000).value, body2(ds));

    auto body_ab = [&](double d) {
        return std::pow(96.0 * d / sstar(d), 1.0 / b) / std::min(sq(d), d);
    };
    ec.a_b = 2.0 / sq(ds) * std::log(2.0) +
             2.0 * std::max(log_grid_sup(body_ab, ds, ds * 1e10, 6000).value, body_ab(ds));

    ec.C_NRmk = ec.C1 + ec.C2 + 2.0 * chi * ec.a_b;

    // C_D: largest slope of the moduli on [0,1], floored at 2.
    double slope = 0.0;
    for (const auto& ms : moduli) {
        const int grid = 4096;
        for (int i = 0; i <= grid; ++i) {
            const double zz = static_cast<double>(i) / grid;
            double dp;
            if (ms.D_prime) {
                dp = ms.D_prime(zz);
            } else {
                const double h = 1e-6;
                const double z0 = std::max(0.0, zz - h), z1 = std::min(1.0, zz + h);
                dp = (ms.D(z1) - ms.D(z0)) / (z1 - z0);
            }
            slope = std::max(slope, dp);
        }
    }
    ec.C_D = std::max(2.0, slope);

    ec.c_b = 4.0 * std::sqrt(2.0) * (std::pow(2.0, b) + 1.0) * std::pow(b, b);
    const double cb_eff = chi ? ec.c_b : 0.0;
    ec.lambda1 = 4.0 * std::sqrt(2.0 * std::exp(1.0)) * std::max(std::sqrt(ec.C_D), cb_eff);
    ec.lambda2 = (16.0 / 3.0) * std::max(ec.C_D, 8.0 * std::exp(1.0));
    ec.C_Db = std::max(std::max(std::sqrt(2.0 * ec.C_D), cb_eff),
                       (2.0 / 3.0) * std::max(ec.C_D, 8.0 * std::exp(1.0)));
    return ec;
}

// ---------------------------------------------------------------------------

double BoundedFamilyEnvelopes::V(std::size_t i, double n) const {
    const double body = P[i] + extra[i] + u;
    return lambda1 * std::sqrt(g_inf[i] * F_trunc[i] / n * body) +
           lambda2 * g_inf[i] * std::pow(std::log(n), beta_exp) / n * body;
}

double BoundedFamilyEnvelopes::U(std::size_t i, double n) const {
    const double body = M[i] + extra[i] + u;
    return lambda1 * std::sqrt(g_inf[i] * F_trunc[i] / n * body) +
           lambda2 * g_inf[i] * std::pow(std::log(n), beta_exp) / n * body;
}

BoundedFamilyEnvelopes bounded_family_envelopes(
    const EmpiricalConstants& ec, const std::vector<HPoint>& pts, double G_low,
    double F_sup, long n1, long n2, double r_trunc, double u, double q,
    const std::function<double(double)>& Lk) {
    if (!(n1 >= 3) || !(n2 >= n1) || !(n2 < 2 * n1))
        throw std::domain_error("bounded_family_envelopes: need 3 <= n1 <= n2 < 2 n1");
    if (!(u >= 1.0) || !(q >= 1.0))
        throw std::domain_error("bounded_family_envelopes: u, q must be >= 1");
    if ((n1 == n2) != (ec.chi == 0))
        throw std::domain_error("bounded_family_envelopes: chi inconsistent with n-range");

    BoundedFamilyEnvelopes e;
    e.lambda1 = ec.lambda1;
    e.lambda2 = ec.lambda2;
    e.beta_exp = (n1 == n2) ? 0.0 : ec.b;
    e.u = u;
    e.q = q;
    const double ds2 = 1.0 / sq(ec.delta_star);
    for (const auto& pt : pts) {
        const double ratio = 2.0 * pt.g_inf / G_low;
        const double lk = Lk ? Lk(pt.g_inf) : 0.0;
        e.P.push_back((36.0 * ec.k * ds2 + 6.0) * std::log1p(std::log(ratio)) +
                      36.0 * ec.N * ds2 * lk + 18.0 * ec.C_NRmk);
        e.M.push_back((72.0 * ec.k * ds2 + 2.5 * q + 1.5) * std::log(ratio) +
                      72.0 * ec.N * ds2 * lk + 36.0 * ec.C_NRmk);
        const double ft = std::max(pt.F, std::exp(-r_trunc));
        e.F_trunc.push_back(ft);
        e.extra.push_back(2.0 * std::log1p(std::abs(std::log(ft))));
        e.g_inf.push_back(pt.g_inf);
    }
    e.prob_bound = 2419.0 * std::exp(-u);
    const double n1d = static_cast<double>(n1);
    const double scale = std::max(std::sqrt(F_sup * G_low / n1d),
                                  std::pow(std::log(static_cast<double>(n2)), e.beta_exp) *
                                      G_low / n1d);
    e.moment_bound = ec.c_q(q) * std::pow(scale, q) * std::exp(-u);
    return e;
}

// ---------------------------------------------------------------------------

LilConstant lil_constant(const EmpiricalConstants& ec, const LilParams& p) {
    if (!(p.a > 2.0)) throw std::domain_error("lil_constant: restriction exponent must be > 2");
    if (ec.chi != 1) throw std::domain_error("lil_constant: constants must be built with chi = 1");
    if (!(ec.b > 1.0) || !(ec.b < 0.5 * p.a))
        throw std::domain_error("lil_constant: scale exponent must lie in (1, a/2)");

    const double ds2 = 1.0 / sq(ec.delta_star);
    const double F_bar = std::max(p.F_big, 1.0);
    const double lfb = 2.0 * std::log1p(std::abs(std::log(F_bar)));
    auto price = [&](double n) {
        return (36.0 * ec.k * ds2 + 6.0) * std::log1p(p.b_frak * std::log(2.0 * n)) +
               36.0 * ec.N * ds2 * p.a_frak *
                   std::log1p(std::log(2.0 * p.c_frak * std::pow(n, p.b_frak))) +
               18.0 * ec.C_NRmk;
    };
    auto body = [&](double n) {
        return price(n) + lfb + 2.0 * std::log1p(std::log(n));
    };
    auto loglog = [](double n) { return std::log1p(std::log(n)); };

    LilConstant out;
    const GridSup s1 = log_grid_sup([&](double n) { return body(n) / loglog(n); }, 3.0, 1e9, 4000);
    out.u1 = ec.lambda1 * std::sqrt(F_bar * s1.value);
    out.u2 = ec.lambda2 * s1.value;
    const GridSup s3 = log_grid_sup(
        [&](double n) {
            return std::pow(std::log(n), ec.b - 0.5 * p.a) * std::sqrt(loglog(n));
        },
        3.0, 1e9, 4000);
    out.u3 = s3.value;
    out.upsilon = out.u1 + out.u2 * out.u3;
    return out;
}

// ---------------------------------------------------------------------------

double neighbourhood_log_mass(double mass, double n, double v) {
    if (!(v >= 1.0)) throw std::domain_error("neighbourhood_log_mass: v must be >= 1");
    const double clamped = std::min(std::max(mass, 0.0), 1.0);
    return -std::log(std::max(clamped, std::pow(n, -v)));
}

double PartialCoverEnvelopes::L(std::size_t i, double n) const {
    return neighbourhood_log_mass(mass[i], n, v);
}

namespace {
double two_term(double lam1, double lam2, double g, double f, double n, double beta,
                double body) {
    return lam1 * std::sqrt(g * f / n * body) +
           lam2 * g * std::pow(std::log(n), beta) / n * body;
}
}  // namespace

double PartialCoverEnvelopes::V_tilde(std::size_t i, double n) const {
    const double body = P[i] + L(i, n) + extra[i] + z;
    return two_term(lambda1, lambda2, g_inf[i], F_trunc[i], n, beta_exp, body);
}

double PartialCoverEnvelopes::U_tilde(std::size_t i, double n) const {
    const double body = M[i] + L(i, n) + extra[i] + z;
    return two_term(lambda1, lambda2, g_inf[i], F_trunc[i], n, beta_exp, body);
}

double PartialCoverEnvelopes::V_hat(std::size_t i, double n) const {
    const double phat = P[i] + 2.0 * v * std::abs(std::log(2.0 * g_inf[i]));
    const double body = phat + 2.0 * (v + 1.0) * std::abs(std::log(F_hat[i])) + z;
    return two_term(lambda1, lambda2, g_inf[i], F_hat[i], n, beta_exp, body);
}

double PartialCoverEnvelopes::U_hat(std::size_t i, double n) const {
    const double mhat = M[i] + 2.0 * v * std::abs(std::log(2.0 * g_inf[i]));
    const double body = mhat + 2.0 * (v + 1.0) * std::abs(std::log(F_hat[i])) + z;
    return two_term(lambda1, lambda2, g_inf[i], F_hat[i], n, beta_exp, body);
}

PartialCoverEnvelopes partial_cover_envelopes(
    const EmpiricalConstants& ec, const std::vector<HPoint>& pts,
    const std::vector<double>& neighbourhood_mass, double G_low, double G_up, double F_sup,
    long n1, long n2, double n_overlap, double v, double z, double q,
    const std::function<double(double)>& Lk, double r_trunc) {
    if (!(v >= 1.0)) throw std::domain_error("partial_cover_envelopes: v must be >= 1");
    if (!(z >= 1.0) || !(q >= 1.0))
        throw std::domain_error("partial_cover_envelopes: z, q must be >= 1");
    if (pts.size() != neighbourhood_mass.size())
        throw std::domain_error("partial_cover_envelopes: mass vector size mismatch");

    // Base prices via the bounded-family machinery (z enters separately).
    BoundedFamilyEnvelopes base =
        bounded_family_envelopes(ec, pts, G_low, F_sup, n1, n2, r_trunc, 1.0, q, Lk);

    PartialCoverEnvelopes e;
    e.mass = neighbourhood_mass;
    e.P = base.P;
    e.M = base.M;
    e.F_trunc = base.F_trunc;
    e.extra = base.extra;
    e.g_inf = base.g_inf;
    e.lambda1 = ec.lambda1;
    e.lambda2 = ec.lambda2;
    e.beta_exp = base.beta_exp;
    e.v = v;
    e.z = z;
    e.q = q;
    for (const auto& pt : pts) e.F_hat.push_back(std::max(pt.F, 1.0 / static_cast<double>(n2)));

    const double n5 = std::pow(n_overlap, 5.0);
    const double n1d = static_cast<double>(n1);
    e.prob_bound = n5 * (4838.0 * std::exp(-z) + 2.0 * std::pow(n1d, 2.0 - v));
    const double scale = std::max(std::sqrt(F_sup * G_low / n1d),
                                  std::pow(std::log(static_cast<double>(n2)), e.beta_exp) *
                                      G_low / n1d);
    e.moment_bound = 2.0 * n5 * ec.c_q(q) * std::pow(scale, q) * std::exp(-z) +
                     std::pow(2.0, q + 1.0) * n5 * std::pow(G_up, q) *
                         std::pow(n1d, 2.0 - v);
    return e;
}

// ---------------------------------------------------------------------------

double LocalizedAssembly::volume(const std::vector<double>& r) const {
    double v = 1.0;
    for (std::size_t l = 0; l < r.size(); ++l) v *= std::pow(r[l], gamma[l]);
    return v;
}

double LocalizedAssembly::G_inf(const std::vector<double>& r) const { return gK / volume(r); }

double LocalizedAssembly::rho_band(const std::vector<double>& r,
                                   const std::vector<double>& rp) const {
    double m = 0.0;
    for (std::size_t l = 0; l < r.size(); ++l)
        m = std::max(m, gamma[l] * std::abs(std::log(r[l]) - std::log(rp[l])));
    return m;
}

LocalizedAssembly localized_model(const KernelLocalizedModel& km, bool pointwise) {
    if (km.d < 1) throw std::domain_error("localized_model: dimension must be >= 1");
    if (static_cast<int>(km.gamma.size()) != km.d)
        throw std::domain_error("localized_model: gamma size must equal d");
    if (!(km.alpha > 0.0) || km.alpha > 1.0)
        throw std::domain_error("localized_model: Hoelder exponent must lie in (0,1]");

    // Ratio-Lipschitz spot check on deterministic pairs (sup-norm on R^d).
    {
        const int grid = km.d == 1 ? 160 : 24;
        std::vector<std::vector<double>> pts;
        std::vector<double> t(static_cast<std::size_t>(km.d), 0.0);
        std::function<void(int)> fill = [&](int axis) {
            if (axis == km.d) {
                pts.push_back(t);
                return;
            }
            for (int i = 0; i <= grid; ++i) {
                t[static_cast<std::size_t>(axis)] = -3.0 + 6.0 * i / grid;
                fill(axis + 1);
            }
        };
        fill(0);
        auto supnorm = [&](const std::vector<double>& x) {
            double s = 0.0;
            for (double xi : x) s = std::max(s, std::abs(xi));
            return s;
        };
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto& ta = pts[i];
            const auto& tb = pts[i + 1];
            std::vector<double> diff(ta.size());
            double dn = 0.0;
            for (std::size_t l = 0; l < ta.size(); ++l)
                dn = std::max(dn, std::abs(ta[l] - tb[l]));
            const double lhs = std::abs(km.K(ta) - km.K(tb));
            const double rhs =
                km.L1 * dn / (1.0 + std::min(supnorm(ta), supnorm(tb))) + 1e-12;
            if (lhs > rhs)
                throw std::domain_error(
                    "localized_model: kernel fails the ratio-Lipschitz check near t = " +
                    std::to_string(ta[0]));
        }
    }

    LocalizedAssembly la;
    la.d = km.d;
    la.pointwise = pointwise;
    la.gamma = km.gamma;
    la.gamma_min = *std::min_element(km.gamma.begin(), km.gamma.end());
    la.gK = km.g_sup * km.K_sup;

    const double lk_ratio = km.L1 / km.K_sup;
    const double gmin = la.gamma_min;
    const int d = km.d;
    la.D0 = [d, lk_ratio, gmin](double zz) {
        return std::expm1(d * zz) + lk_ratio * std::expm1(zz / gmin);
    };
    la.D0_prime = [d, lk_ratio, gmin](double zz) {
        return d * std::exp(d * zz) + lk_ratio / gmin * std::exp(zz / gmin);
    };
    if (pointwise) {
        la.Lk = [](double) { return 0.0; };
    } else {
        la.Lk = [](double zz) { return std::log2(std::max(1.0, 2.0 * zz)); };
    }

    la.F_bound = std::pow(2.0, km.d) * km.f_sup * km.g_sup * km.L2;
    for (int l = 0; l < km.d; ++l)
        la.F_bound *= std::pow(2.0, km.gamma[static_cast<std::size_t>(l)]) *
                      km.L_meas[static_cast<std::size_t>(l)];

    // Moduli entering the slope constant: the band map, the Hoelder map of g,
    // and the centre map of K.
    ModulusSpec m0{la.D0, la.D0_prime, [](double zz) { return zz; }};
    const double ga = km.L_alpha / km.g_sup;
    ModulusSpec m1{[ga](double zz) { return ga * zz; }, [ga](double) { return ga; },
                   [](double zz) { return zz; }};
    ModulusSpec m2{[lk_ratio](double zz) { return lk_ratio * zz; },
                   [lk_ratio](double) { return lk_ratio; },
                   pointwise ? std::function<double(double)>([](double) { return 0.0; })
                             : std::function<double(double)>([](double zz) { return zz * zz; })};
    la.moduli = {m0, m1, m2};
    return la;
}

double localized_F(const KernelLocalizedModel& km, const Density& f, double r, double xbar) {
    if (km.d != 1) throw std::domain_error("localized_F: quadrature path is one-dimensional");
    if (!(r > 0.0)) throw std::domain_error("localized_F: r must be > 0");
    const double gamma = km.gamma[0];
    const double vr = std::pow(r, gamma);
    auto integrand = [&](double x) {
        std::vector<double> arg{std::abs(x - xbar) / r};
        return std::abs(km.K(arg)) / vr * f.pdf(x);
    };
    // Break the range at kernel-scale offsets so the adaptive rule cannot skip
    // a narrow bump.
    std::vector<double> cuts{f.lo, f.hi};
    for (double w : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
        for (double s : {-1.0, 1.0}) {
            const double x = xbar + s * w * r;
            if (x > f.lo && x < f.hi) cuts.push_back(x);
        }
    }
    if (xbar > f.lo && xbar < f.hi) cuts.push_back(xbar);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate(integrand, cuts[i], cuts[i + 1], 1e-10);
    return km.g_sup * total;
}

double kernel_tail_check(const KernelLocalizedModel& km, double t_max) {
    if (km.d != 1) throw std::domain_error("kernel_tail_check: one-dimensional path");
    if (!(km.L2 > 0.0)) throw std::domain_error("kernel_tail_check: L2 must be > 0");
    const double gamma = km.gamma[0];
    // Outer supremum of |K| evaluated right-to-left on a shared u-grid.
    const int n = 200000;
    std::vector<double> usup(static_cast<std::size_t>(n) + 1);
    double running = 0.0;
    for (int i = n; i >= 0; --i) {
        const double u = t_max * 1.5 * i / n;
        running = std::max(running, std::abs(km.K({u})));
        usup[static_cast<std::size_t>(i)] = running;
    }
    double worst = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double t = t_max * 1.5 * i / n;
        if (t > t_max) break;
        worst = std::max(worst, std::pow(t, 1.0 + gamma) * usup[static_cast<std::size_t>(i)]);
    }
    return worst / km.L2;
}

// ---------------------------------------------------------------------------

double LocalizedEnvelopes::V(std::size_t i, double n) const {
    const double body = P[i] + extra[i] + u;
    return lam1 * std::sqrt(F_trunc[i] / (n * volume[i]) * body) +
           lam2 * std::pow(std::log(n), beta_exp) / (n * volume[i]) * body;
}

double LocalizedEnvelopes::U(std::size_t i, double n) const {
    const double body = M[i] + extra[i] + u;
    return lam1 * std::sqrt(F_trunc[i] / (n * volume[i]) * body) +
           lam2 * std::pow(std::log(n), beta_exp) / (n * volume[i]) * body;
}

LocalizedEnvelopes localized_pointwise_envelopes(
    const EmpiricalConstants& ec, const LocalizedAssembly& la,
    const std::vector<std::vector<double>>& r_grid, const std::vector<double>& F_values,
    const std::vector<double>& r_max, long n1, long n2, double r_trunc, double u, double q) {
    if (r_grid.size() != F_values.size())
        throw std::domain_error("localized_pointwise_envelopes: F vector size mismatch");
    if (!(n1 >= 3) || !(n2 >= n1) || !(n2 < 2 * n1))
        throw std::domain_error("localized_pointwise_envelopes: need 3 <= n1 <= n2 < 2 n1");
    if ((n1 == n2) != (ec.chi == 0))
        throw std::domain_error("localized_pointwise_envelopes: chi inconsistent with n-range");

    LocalizedEnvelopes e;
    e.lam1 = std::sqrt(la.gK) * ec.lambda1;
    e.lam2 = la.gK * ec.lambda2;
    e.beta_exp = (n1 == n2) ? 0.0 : ec.b;
    e.u = u;
    e.q = q;
    const double ds2 = 1.0 / sq(ec.delta_star);
    const int d = la.d;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const auto& r = r_grid[i];
        double band = 0.0;
        for (int l = 0; l < d; ++l) {
            const std::size_t ll = static_cast<std::size_t>(l);
            if (!(r[ll] > 0.0) || r[ll] > r_max[ll] * (1.0 + 1e-12))
                throw std::domain_error(
                    "localized_pointwise_envelopes: bandwidth outside the admissible range");
            band += la.gamma[ll] * std::log(2.0 * r_max[ll] / r[ll]);
        }
        e.P.push_back((36.0 * d * ds2 + 6.0) * std::log1p(band) + 18.0 * ec.C_NRmk);
        e.M.push_back((72.0 * d * ds2 + 2.5 * q + 1.5) * band + 36.0 * ec.C_NRmk);
        const double ft = std::max(F_values[i], std::exp(-r_trunc));
        e.F_trunc.push_back(ft);
        e.extra.push_back(2.0 * std::log1p(std::abs(std::log(ft))));
        e.volume.push_back(la.volume(r));
    }

    e.prob_bound = 2419.0 * std::exp(-u);
    double v_rmax = 1.0;
    for (int l = 0; l < d; ++l)
        v_rmax *= std::pow(r_max[static_cast<std::size_t>(l)],
                           la.gamma[static_cast<std::size_t>(l)]);
    const double F_sup = *std::max_element(F_values.begin(), F_values.end());
    const double n1d = static_cast<double>(n1);
    const double scale =
        std::max(std::sqrt(F_sup / (n1d * v_rmax)),
                 std::pow(std::log(static_cast<double>(n2)), e.beta_exp) / (v_rmax * n1d));
    const double cq_loc =
        std::pow(2.0, 3.5 * q + 5.0) * std::pow(3.0, q + 4.0) * gamma_fn(q + 1.0) *
        std::pow(ec.C_Db * std::max(std::sqrt(la.gK), la.gK), q);
    e.moment_bound = cq_loc * std::pow(scale, q) * std::exp(-u);
    return e;
}

double SupnormEnvelopes::U_hat(std::size_t i, double n) const {
    const double body = M_hat[i] + 2.0 * (v + 1.0) * std::abs(std::log(F_hat[i])) + z;
    return lam1 * std::sqrt(F_hat[i] / (n * volume[i]) * body) +
           lam2 * std::pow(std::log(n), beta_exp) / (n * volume[i]) * body;
}

SupnormEnvelopes localized_supnorm_envelopes(
    const EmpiricalConstants& ec, const LocalizedAssembly& la,
    const std::vector<std::vector<double>>& r_grid, const std::vector<double>& F_values,
    const std::vector<double>& r_max, const std::vector<double>& r_min, long n1, long n2,
    double n_overlap, double v, double z, double q) {
    if (!(v >= 1.0) || !(z >= 1.0) || !(q >= 1.0))
        throw std::domain_error("localized_supnorm_envelopes: v, z, q must be >= 1");
    if ((n1 == n2) != (ec.chi == 0))
        throw std::domain_error("localized_supnorm_envelopes: chi inconsistent with n-range");

    SupnormEnvelopes e;
    e.lam1 = std::sqrt(la.gK) * ec.lambda1;
    e.lam2 = la.gK * ec.lambda2;
    e.beta_exp = (n1 == n2) ? 0.0 : ec.b;
    e.v = v;
    e.z = z;
    e.q = q;
    const double ds2 = 1.0 / sq(ec.delta_star);
    e.C_big = 72.0 * ec.N * ds2 * std::abs(std::log2(la.gK)) + 36.0 * ec.C_NRmk;
    const int d = la.d;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double vol = la.volume(r_grid[i]);
        e.volume.push_back(vol);
        e.M_hat.push_back(((72.0 * d + 108.0 * ec.N) * ds2 + 2.5 * q + 2.0 * v + 1.5) *
                              std::log(2.0 / vol) +
                          e.C_big);
        e.F_hat.push_back(std::max(F_values[i], 1.0 / static_cast<double>(n2)));
    }

    const double n5 = std::pow(n_overlap, 5.0);
    const double n1d = static_cast<double>(n1);
    e.prob_bound = n5 * (4838.0 * std::exp(-z) + 2.0 * std::pow(n1d, 2.0 - v));
    double v_rmax = 1.0, v_rmin = 1.0;
    for (int l = 0; l < d; ++l) {
        const std::size_t ll = static_cast<std::size_t>(l);
        v_rmax *= std::pow(r_max[ll], la.gamma[ll]);
        v_rmin *= std::pow(r_min[ll], la.gamma[ll]);
    }
    const double F_sup = *std::max_element(e.F_hat.begin(), e.F_hat.end());
    const double scale =
        std::max(std::sqrt(F_sup / (n1d * v_rmax)),
                 std::pow(std::log(static_cast<double>(n2)), e.beta_exp) / (v_rmax * n1d));
    const double cq_loc =
        std::pow(2.0, 3.5 * q + 5.0) * std::pow(3.0, q + 4.0) * gamma_fn(q + 1.0) *
        std::pow(ec.C_Db * std::max(std::sqrt(la.gK), la.gK), q);
    e.moment_bound = 2.0 * n5 * cq_loc * std::pow(scale, q) +
                     std::pow(2.0, q + 1.0) * n5 * std::pow(v_rmin, -q) *
                         std::pow(n1d, 2.0 - v);
    return e;
}

// ---------------------------------------------------------------------------

CoverRd lattice_cover(int d, double r_sep) {
    if (d < 1 || !(r_sep > 0.0)) throw std::domain_error("lattice_cover: bad parameters");
    CoverRd c;
    c.d = d;
    c.r_sep = r_sep;
    c.n_overlap = std::pow(3.0, d);
    return c;
}

std::pair<double, double> CoverRd::neighbourhood_axis(double x) const {
    const double t = x / r_sep;
    const double i_lo = std::ceil(t - 0.5 - 1e-12);
    const double i_hi = std::floor(t + 0.5 + 1e-12);
    return {r_sep * (i_lo - 1.0) - 0.5 * r_sep, r_sep * (i_hi + 1.0) + 0.5 * r_sep};
}

SupportCheck support_check(const KernelLocalizedModel& km,
                           const std::function<std::vector<double>(long)>& r_max_of_n,
                           double t_frak, long n_lo, long n_hi) {
    SupportCheck out;
    std::vector<double> shells;
    for (double w : {1.0 + 1e-9, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0})
        shells.push_back(w * t_frak);
    for (long n = n_lo; n <= n_hi; n = std::max(n + 1, n + n / 4)) {
        const std::vector<double> r = r_max_of_n(n);
        std::vector<double> u(static_cast<std::size_t>(km.d), 0.0);
        // Scan axis-aligned shell points; by symmetry of the decay condition
        // these dominate for product-form kernels.
        for (int axis = 0; axis < km.d; ++axis) {
            for (double s : shells) {
                std::fill(u.begin(), u.end(), 0.0);
                for (double sign : {-1.0, 1.0}) {
                    u[static_cast<std::size_t>(axis)] = sign * s;
                    std::vector<double> arg(u.size());
                    for (std::size_t l = 0; l < u.size(); ++l) arg[l] = u[l] / r[l];
                    const double ratio = std::abs(km.K(arg)) * static_cast<double>(n) / km.K_sup;
                    if (ratio > out.worst_ratio) {
                        out.worst_ratio = ratio;
                        out.witness_u = u;
                        out.witness_n = static_cast<double>(n);
                    }
                }
            }
        }
    }
    out.ok = out.worst_ratio <= 1.0 + 1e-9;
    return out;
}

// ---------------------------------------------------------------------------

double ll_constant(const EmpiricalConstants& ec, const LlParams& p) {
    if (!(p.a > 4.0)) throw std::domain_error("ll_constant: restriction exponent must be > 4");
    if (ec.chi != 1) throw std::domain_error("ll_constant: constants must be built with chi = 1");
    if (!(ec.b > 1.0) || !(ec.b < 0.5 * p.a - 1.0))
        throw std::domain_error("ll_constant: scale exponent must lie in (1, a/2 - 1)");

    const double ds2 = 1.0 / sq(ec.delta_star);
    const double F_bar = std::max(p.F_big, 1.0);
    const double lfb = std::abs(std::log(F_bar));
    const double v = 3.0;
    auto Lk = p.Lk ? p.Lk : [](double) { return 0.0; };

    auto ratio = [&](double n, double G) {
        const double price = (36.0 * ec.k * ds2 + 6.0) * std::log1p(std::log(2.0 * G / p.c_frak)) +
                             36.0 * ec.N * ds2 * Lk(G) + 18.0 * ec.C_NRmk +
                             2.0 * v * std::abs(std::log(2.0 * G));
        const double zn = 2.0 * std::log1p(std::log(n));
        const double body1 = price + 2.0 * (v + 1.0) * lfb + zn;
        const double body2 =
            price + 2.0 * (v + 1.0) * std::max(lfb, std::log(2.0 * n)) + zn;
        const double num = ec.lambda1 * std::sqrt(F_bar * G * body1 / n) +
                           ec.lambda2 * G / n * std::pow(std::log(2.0 * n), ec.b) * body2;
        const double den = std::sqrt(
            G * std::max(std::log(G / p.c_frak), std::log(std::log(n))) / n);
        return num / den;
    };

    auto sweep = [&](int grid_n, int grid_g) {
        double best = 0.0;
        for (int i = 0; i <= grid_n; ++i) {
            const double n = 3.0 * std::pow(1e9 / 3.0, static_cast<double>(i) / grid_n);
            const double g_hi = std::min(p.c_frak * std::pow(n, p.b_frak),
                                         n * std::pow(std::log(n), -p.a));
            if (!(g_hi > p.c_frak)) continue;
            for (int j = 0; j <= grid_g; ++j) {
                const double G =
                    p.c_frak * std::pow(g_hi / p.c_frak, static_cast<double>(j) / grid_g);
                best = std::max(best, ratio(n, G));
            }
        }
        return best;
    };
    const double coarse = sweep(400, 120);
    const double fine = sweep(800, 240);
    if (std::abs(fine - coarse) > 5e-2 * std::max(fine, 1.0))
        throw numeric_guard_error("ll_constant: sup not stable under grid refinement");
    return fine;
}

}  // namespace upfn
