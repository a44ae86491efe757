#include "upfn/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "upfn/weights.hpp"

namespace upfn {

namespace {
constexpr double kSixOverPiSq = 0.6079271018540267;
}

TailModel gaussian_tail_model(const std::vector<double>& V, const Metric& rho) {
    TailModel m;
    m.c = 2.0;
    m.b_zero = true;
    m.A.resize(V.size());
    m.B.assign(V.size(), 0.0);
    const double s2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < V.size(); ++i) m.A[i] = s2 * V[i];
    m.a = [rho, s2](int i, int j) { return s2 * rho(i, j); };
    m.b = [](int, int) { return 0.0; };
    return m;
}

// ---------------------------------------------------------------------------

double wiener_weight(double u, double delta, int d, double p) {
    if (!(u >= 1.0)) throw std::domain_error("wiener_weight: u must be >= 1");
    if (!(delta > 0.0)) throw std::domain_error("wiener_weight: delta must be > 0");
    const double delta_u = std::pow(u, 0.5 * d - d / p);
    const double m = std::floor(std::log2(delta_u));
    const double t = std::log2(delta) - m;
    return (3.0 / (4.0 * sq(3.141592653589793238))) / (1.0 + t * t);
}

double wiener_weight_lambda1() {
    // sup over scales of the weight ratio reduces to
    // sup_x (1 + log2^2 x) / (1 + log2^2(x/2)).
    double best = 1.0;
    for (int i = 0; i <= 200000; ++i) {
        const double y = -50.0 + 100.0 * i / 200000.0;  // y = log2 x
        const double v = (1.0 + y * y) / (1.0 + sq(y - 1.0));
        best = std::max(best, v);
    }
    return best;
}

WienerLpConstants wiener_lp_pipeline(const WienerIntegralModel& model, double q) {
    if (!(model.gamma > 0.5 * model.d))
        throw std::domain_error("wiener_lp_pipeline: requires gamma > d/2");
    if (!(model.p >= 2.0)) throw std::domain_error("wiener_lp_pipeline: requires p >= 2");
    if (!(model.h_min > 0.0) || !(model.h_min <= model.h_max) || !(model.h_max < 1.0))
        throw std::domain_error("wiener_lp_pipeline: requires 0 < h_min <= h_max < 1");
    if (!(q >= 1.0)) throw std::domain_error("wiener_lp_pipeline: q must be >= 1");
    if (!(model.c0 > 0.0)) throw std::domain_error("wiener_lp_pipeline: c0 must be > 0");

    const int d = model.d;
    const double p = model.p;
    WienerLpConstants k;
    k.alpha = std::min(2.0 / (p - 1.0), 2.0 - d / model.gamma);

    k.c1 = model.c0 * std::pow(3.0, 4.0 * d) * sq(static_cast<double>(d));
    k.c2 = 4.0 * std::pow(144.0, 4.0) * k.c1;
    k.c3 = std::pow(4.0 * sq(3.141592653589793238) / 3.0, 4.0) * k.c2;

    // sup_{x>=0} 2^{-alpha x} (1+x^2)^4 by stationary points of the log.
    const double a = k.alpha * std::log(2.0);
    auto f = [a](double x) { return std::exp(-a * x) * std::pow(1.0 + x * x, 4.0); };
    double sup = f(0.0);
    const double disc = 16.0 - a * a;
    if (disc >= 0.0) {
        sup = std::max(sup, f((4.0 - std::sqrt(disc)) / a));
        sup = std::max(sup, f((4.0 + std::sqrt(disc)) / a));
    }
    {  // refinement-stability cross-check of the closed-form search
        const GridSup g = log_grid_sup([&](double x) { return f(x); }, 1e-6, 1e3, 4000);
        if (g.value > sup * (1.0 + 5e-3))
            throw numeric_guard_error("wiener_lp_pipeline: stationary-point sup too small");
    }
    k.sup_weight_term = sup;
    k.c4 = 5.0 * k.c3 * sup;
    k.c5 = k.c4 * std::pow(2.0, d / p);

    k.lambda1 = wiener_weight_lambda1();
    if (!(k.lambda1 < 3.0))
        throw numeric_guard_error("wiener_lp_pipeline: weight coupling factor not < 3");

    // Envelope coefficient from the scale-level bound
    // U(h) <= sqrt(2) g_A(2/h) sqrt(32 c5 h^{-2d/p} + 2^{d/p} h^{-2d/p} + 1).
    k.C1 = 2.0 * std::pow(2.0, d * (p - 2.0) / (2.0 * p)) *
           std::sqrt(32.0 * k.c5 + std::pow(2.0, d / p) + 1.0);

    // Scale sums with R(t) = t^{2d/p} over tau1 in [1/h_max, 1/h_min].
    const double tau_bar = 1.0 / model.h_min;
    const double tau_low = 1.0 / model.h_max;
    const long J =
        static_cast<long>(std::floor(std::log(tau_bar / tau_low) / std::log(std::sqrt(2.0)))) + 1;
    const double expo = 2.0 * d / p;
    auto g_A = [&](double u) { return std::sqrt(2.0) * std::pow(u, d * (p - 2.0) / (2.0 * p)); };
    double r0 = 0.0, rq = 0.0;
    for (long j = 0; j <= J; ++j) {
        const double t = tau_bar * std::pow(2.0, -0.5 * j);
        const double w = std::exp(-std::pow(t, expo));
        r0 += w;
        rq += std::pow(g_A(t), q) * w;
    }
    k.tail_exponent = std::pow(2.0, -1.5) * std::pow(model.h_max, -expo);
    k.c8 = r0 * std::exp(k.tail_exponent);
    k.c9 = rq * std::exp(k.tail_exponent) * std::pow(model.h_max, -q * d * (2.0 - p) / (2.0 * p));

    // Probability / moment bounds at z = 1, eps = sqrt(2)-1, tail constant 2.
    const double c = 2.0;
    k.C2 = 2.0 * c * k.c8 / std::exp(1.0);
    k.C3q = c * std::pow(2.0, 2.5 * q + 1.0) * gamma_fn(q + 1.0) *
            std::pow(kSqrt2Minus1, -q) * k.c9 / std::exp(1.0);

    return k;
}

double lp_reduction_factor(double mu, int d, double p) {
    if (!(p >= 1.0) || !(p < 2.0))
        throw std::domain_error("lp_reduction_factor: target p must lie in [1,2)");
    if (!(mu >= 1.0)) throw std::domain_error("lp_reduction_factor: mu must be >= 1");
    return std::pow(mu, d * (2.0 - p) / (2.0 * p));
}

// ---------------------------------------------------------------------------

namespace {

// Smallest delta with 48 c_high delta (1 + ln^2 delta) = c_low * 6/pi^2; below
// it one ball covers the whole set and the entropy term vanishes.
double one_ball_threshold(double c_low, double c_high) {
    const double target = c_low * kSixOverPiSq / (48.0 * c_high);
    double lo = 1e-30, hi = 1.0;
    auto f = [](double x) { return x * (1.0 + sq(std::log(x))); };
    for (int i = 0; i < 400; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (f(mid) > target)
            hi = mid;
        else
            lo = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

double doubling_capacity_constant(double beta, double c_low, double c_high, double n_d) {
    if (!(beta > 0.0) || !(c_low > 0.0) || !(c_low <= c_high) || !(n_d >= 1.0))
        throw std::domain_error("doubling_capacity_constant: bad parameters");
    const double dtilde = one_ball_threshold(c_low, c_high);
    const double ratio = std::log2(48.0 * c_high / c_low);
    auto body = [&](double delta) {
        const double bracket = pos(ratio + std::log2(delta / eval_s_star(delta)));
        return (bracket / beta + 1.0) / sq(delta);
    };
    const GridSup g = log_grid_sup(body, dtilde, dtilde * 1e8, 6000);
    return std::log(n_d) * std::max(g.value, body(dtilde));
}

double doubling_capacity_intrinsic(double n_d) {
    return doubling_capacity_constant(1.0, std::sqrt(2.0), std::sqrt(2.0), n_d);
}

DoublingModulusResult doubling_modulus_pipeline(const DoublingModulusModel& model) {
    if (!(model.r > 0.0) || !(model.r < 1.0))
        throw std::domain_error("doubling_modulus_pipeline: r must lie in (0,1)");
    DoublingModulusResult res;
    res.C = doubling_capacity_constant(model.beta, model.c_low, model.c_high, model.n_d);
    res.z_r = std::log1p(std::log1p(std::abs(std::log(model.r))));
    res.eps_r = 1.0 / res.z_r;

    const double eps = res.eps_r;
    const double chain = 2.0 * sq(1.0 + 1.0 / eps) * res.C;
    auto ratio = [&](double delta) {
        const double num =
            chain + sq(1.0 + eps) * (ell(std::max(1.0, 2.0 * model.r / delta)) + res.z_r);
        const double den = std::log1p(std::abs(std::log(delta)));
        return std::sqrt(num / den);
    };
    const GridSup g =
        log_grid_sup(ratio, model.r * std::exp(-60.0), model.r, 8000);
    res.a_r = std::pow(1.0 + eps, 1.0 + 2.0 * model.beta) * g.value;

    res.p_r = (2.0 + 1.0 / sq(std::log1p(std::log1p(eps)))) /
              (1.0 + std::log1p(std::abs(std::log(model.r))));
    res.bound = 8.0 * res.p_r;
    return res;
}

DoublingModulusModel example_catalog(const std::string& name, double param1, double param2) {
    DoublingModulusModel m;
    if (name == "levy") {
        const int d = static_cast<int>(param1);
        if (d < 1) throw std::domain_error("example_catalog: levy dimension must be >= 1");
        m.beta = 0.5;
        m.c_low = m.c_high = std::sqrt(2.0);
        m.n_d = d == 1 ? 2.0 : std::pow(5.0, d);
    } else if (name == "fbm") {
        const double alpha = param1;
        if (!(alpha > 0.0) || alpha > 2.0)
            throw std::domain_error("example_catalog: fbm exponent must lie in (0,2]");
        m.beta = 0.5 * alpha;
        m.c_low = m.c_high = std::sqrt(2.0);
        m.n_d = 2.0;
    } else if (name == "ou") {
        const double sigma = param1, lambda = param2;
        if (!(sigma > 0.0) || !(lambda > 0.0))
            throw std::domain_error("example_catalog: ou parameters must be > 0");
        m.beta = 0.5;
        m.c_high = sigma * std::sqrt(2.0);
        m.c_low = sigma * std::sqrt(2.0) * std::exp(-1.0) * std::exp(-0.5 * lambda);
        m.n_d = 2.0;
    } else {
        throw std::domain_error("example_catalog: unknown process name '" + name + "'");
    }
    return m;
}

}  // namespace upfn
