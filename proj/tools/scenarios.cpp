#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "upfn/chaining.hpp"
#include "upfn/cover.hpp"
#include "upfn/empirical.hpp"
#include "upfn/gaussian.hpp"
#include "upfn/mc.hpp"
#include "upfn/parallel.hpp"
#include "upfn/report.hpp"
#include "upfn/weights.hpp"

namespace upfn::cli {

namespace {

using upfn::RngStream;

double parse_num(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad numeric value: " + s);
    return v;
}

constexpr const char* kReportColumns[] = {
    "scenario",       "parameter", "statistic_mean", "statistic_max",
    "exceedances",    "replications", "threshold",   "theory_bound",
    "empirical_upper_ci", "pass"};

struct ReportBuilder {
    explicit ReportBuilder(std::string scenario) : scenario_(std::move(scenario)) {
        for (const char* c : kReportColumns) table_.columns.push_back(c);
    }

    void add(const std::string& parameter, const std::vector<double>& stats,
             double threshold, double theory, double level) {
        long k = 0;
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : stats) {
            if (v > threshold) ++k;
            mx = std::max(mx, v);
        }
        const double mean = pairwise_sum(stats) / static_cast<double>(stats.size());
        const double cp = binomial_upper_bound(k, static_cast<long>(stats.size()), level);
        const double capped = std::min(1.0, theory);
        // When the bound sits below the resolution of the replication budget
        // (the zero-count confidence bound already exceeds it), fall back to
        // requiring zero observed exceedances.
        const double resolution =
            binomial_upper_bound(0, static_cast<long>(stats.size()), level);
        const bool pass = cp <= capped || (k == 0 && resolution > capped);
        table_.rows.push_back({scenario_, parameter, format_double(mean), format_double(mx),
                               std::to_string(k), std::to_string(stats.size()),
                               format_double(threshold), format_double(capped),
                               format_double(cp), pass ? "true" : "false"});
        all_pass = all_pass && pass;
    }

    void add_info(const std::string& parameter, double value, double threshold, double theory,
                  bool pass) {
        table_.rows.push_back({scenario_, parameter, format_double(value), format_double(value),
                               "0", "0", format_double(threshold), format_double(theory),
                               format_double(value), pass ? "true" : "false"});
        all_pass = all_pass && pass;
    }

    void write(const ScenarioContext& ctx) const {
        const std::string path =
            ctx.out_dir + "/report_" + scenario_ + (ctx.json ? ".json" : ".csv");
        if (ctx.json)
            write_json_atomic(table_, path);
        else
            write_csv_atomic(table_, path);
    }

    std::string scenario_;
    Table table_;
    bool all_pass = true;
};

void write_manifest(const ScenarioContext& ctx, const std::string& scenario,
                    const std::vector<ConstantEntry>& entries) {
    const std::string path =
        ctx.out_dir + "/constants_" + scenario + (ctx.json ? ".json" : ".csv");
    write_constants_manifest(entries, path, ctx.json);
}

// Percentile-bootstrap upper end for a stored excess sample.
double bootstrap_upper(const std::vector<double>& excess, double level, std::uint64_t seed,
                       std::uint64_t experiment) {
    const int B = 1000;
    std::vector<double> means(B);
    RngStream boot(seed, experiment ^ 0x626f6f74ull, 0);
    const std::size_t R = excess.size();
    for (int b = 0; b < B; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < R; ++i)
            acc += excess[static_cast<std::size_t>(boot.next_u64() % R)];
        means[static_cast<std::size_t>(b)] = acc / static_cast<double>(R);
    }
    std::sort(means.begin(), means.end());
    return means[std::min<std::size_t>(means.size() - 1,
                                       static_cast<std::size_t>(std::ceil(level * B)))];
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * i / std::max(1, n - 1);
    return v;
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] =
            a * std::pow(b / a, static_cast<double>(i) / std::max(1, n - 1));
    return v;
}

// Triangular kernel on [-1, 1]; ratio-Lipschitz with constant 2.
double tri_kernel(double u) { return pos(1.0 - std::abs(u)); }

KernelLocalizedModel tri_kernel_model() {
    KernelLocalizedModel km;
    km.d = 1;
    km.K = [](const std::vector<double>& u) { return tri_kernel(u[0]); };
    km.K_sup = 1.0;
    km.L1 = 2.0;
    km.g_sup = 1.0;
    km.L_alpha = 0.0;
    km.alpha = 1.0;
    km.gamma = {1.0};
    km.L2 = 4.0 / 27.0;  // sup_t t^2 (1-t)_+
    km.L_meas = {2.0};  // Lebesgue measure of the two-sided ball B(r, x)
    km.f_sup = 1.0;
    return km;
}

Density uniform_density() {
    Density f;
    f.pdf = [](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
    f.lo = 0.0;
    f.hi = 1.0;
    f.f_sup = 1.0;
    return f;
}

// ---------------------------------------------------------------------------

int scenario_prop1(const ScenarioContext& ctx) {
    const double sigma = ctx.num("sigma", 1.0);
    const double lambda = ctx.num("lambda", 1.0);
    const int grid_n = static_cast<int>(ctx.integer("grid_n", 64));
    const double eps = ctx.num("eps", kSqrt2Minus1);
    const double level = ctx.num("level", 0.99);
    const std::vector<double> ys = ctx.list("y_list", "1,2,4");

    const std::vector<double> t = linspace(0.0, 1.0, grid_n);
    const double var = sq(sigma) / (2.0 * lambda);
    std::vector<double> V(t.size(), std::sqrt(var));
    Metric rho = [t, var, lambda](int i, int j) {
        return std::sqrt(2.0 * var *
                         (1.0 - std::exp(-lambda * std::abs(t[static_cast<std::size_t>(i)] -
                                                            t[static_cast<std::size_t>(j)]))));
    };
    TailModel model = gaussian_tail_model(V, rho);
    spot_check_semimetrics(model);

    auto cert = ensure_class_s(s_star(), 200, s_star_tail_bound(200));
    std::vector<int> all(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) all[i] = static_cast<int>(i);
    const EntropyProvider prov = EntropyProvider::greedy_finite(all, model.a);
    const double kappa1 = model.A_sup();
    const double cap = capacity_term(cert.weight, kappa1, prov, 2);

    ReportBuilder rb("prop1_gaussian_grid");
    std::vector<ConstantEntry> consts{
        {"delta_star", delta_star_root(), "stated"},
        {"weight_factor", cert.factor, "derived"},
        {"capacity_a", cap, "derived"},
        {"A_sup", kappa1, "derived"},
        {"eps", eps, "stated"},
    };

    for (double y : ys) {
        const double U = u_eps_s(y, {kappa1, 0.0}, cap, eps);
        const double theory = suprema_probability_bound(model.c, eps, y);
        std::vector<double> stats(static_cast<std::size_t>(ctx.replications));
        run_indexed(
            stats.size(),
            [&](std::size_t i) {
                RngStream rng(ctx.seed, 0x70726f70u, static_cast<std::uint64_t>(i));
                const auto path = simulate_ou(t, sigma, lambda, rng);
                double m = 0.0;
                for (double v : path) m = std::max(m, std::abs(v));
                stats[i] = m;
            },
            ctx.threads);
        std::ostringstream name;
        name << "y=" << y;
        rb.add(name.str(), stats, U, theory, level);
        consts.push_back({"U(" + name.str() + ")", U, "derived"});
    }
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_, consts);
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int scenario_wiener(const ScenarioContext& ctx) {
    WienerIntegralModel wm;
    wm.d = 1;
    wm.p = ctx.num("p", 2.0);
    wm.gamma = ctx.num("gamma", 1.0);
    wm.mu = ctx.num("mu", 1.0);
    wm.c0 = ctx.num("c0", 1.0);
    const double q = ctx.num("q", 1.0);
    const std::vector<double> hs =
        ctx.list("h_list", "0.125,0.0625,0.03125,0.015625,0.0078125");
    wm.h_min = *std::min_element(hs.begin(), hs.end());
    wm.h_max = *std::max_element(hs.begin(), hs.end());
    const int mesh_div = static_cast<int>(ctx.integer("mesh_div", 16));
    const int t_n = static_cast<int>(ctx.integer("t_grid", 512));
    const double level = ctx.num("level", 0.99);

    const WienerLpConstants wc = wiener_lp_pipeline(wm, q);
    auto K = [](double u) { return pos(0.5 - std::abs(u)); };  // Lipschitz-1, sup 1/2

    const std::vector<double> t = linspace(-0.5 * wm.mu, 0.5 * wm.mu, t_n);
    const double lo = -0.5 * wm.mu - 0.6 * wm.h_max, hi = 0.5 * wm.mu + 0.6 * wm.h_max;
    const double mesh = wm.h_min / mesh_div;
    const long cells = static_cast<long>(std::ceil((hi - lo) / mesh));

    // Shared white noise across the bandwidths within one replication.
    const std::size_t R = static_cast<std::size_t>(ctx.replications);
    std::vector<std::vector<double>> norms(hs.size(), std::vector<double>(R));
    std::vector<double> joint(R);
    run_indexed(
        R,
        [&](std::size_t rep) {
            RngStream rng(ctx.seed, 0x77696e72u, static_cast<std::uint64_t>(rep));
            std::vector<double> w(static_cast<std::size_t>(cells));
            const double sd = std::sqrt(mesh);
            for (auto& x : w) x = sd * rng.normal();
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t hidx = 0; hidx < hs.size(); ++hidx) {
                const double h = hs[hidx];
                std::vector<double> field(t.size());
                for (std::size_t ti = 0; ti < t.size(); ++ti) {
                    const double tv = t[ti];
                    const long i0 =
                        std::max<long>(0, static_cast<long>((tv - 0.5 * h - lo) / mesh) - 1);
                    const long i1 = std::min<long>(
                        cells - 1, static_cast<long>((tv + 0.5 * h - lo) / mesh) + 1);
                    double acc = 0.0;
                    for (long i = i0; i <= i1; ++i) {
                        const double u = lo + (static_cast<double>(i) + 0.5) * mesh;
                        acc += K((tv - u) / h) * w[static_cast<std::size_t>(i)];
                    }
                    field[ti] = acc / h;
                }
                const double norm = lp_norm_grid(field, t, wm.p);
                norms[hidx][rep] = norm;
                worst = std::max(worst, norm - wc.C1 * std::pow(h, -0.5 * wm.d));
            }
            joint[rep] = worst;
        },
        ctx.threads);

    ReportBuilder rb("thm1_wiener_lp");
    const double theory = wc.C2 * std::exp(-wc.tail_exponent);
    rb.add("sup_h", joint, 0.0, theory, level);

    // Per-bandwidth rows and the log-log sharpness slope.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        std::ostringstream name;
        name << "h=" << hs[i];
        rb.add(name.str(), norms[i], wc.C1 * std::pow(hs[i], -0.5 * wm.d), theory, level);
        const double mean = pairwise_sum(norms[i]) / static_cast<double>(R);
        const double lx = std::log(hs[i]), ly = std::log(mean);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double nh = static_cast<double>(hs.size());
    const double slope = (nh * sxy - sx * sy) / (nh * sxx - sx * sx);
    const bool slope_ok = std::abs(slope + 0.5 * wm.d) <= 0.05;
    rb.add_info("loglog_slope", slope, -0.5 * wm.d, 0.05, slope_ok);
    rb.write(ctx);

    write_manifest(ctx, rb.scenario_,
                   {{"delta_star", delta_star_root(), "stated"},
                    {"alpha", wc.alpha, "stated"},
                    {"c0", wm.c0, "assumed"},
                    {"c1", wc.c1, "stated"},
                    {"c2", wc.c2, "stated"},
                    {"c3", wc.c3, "stated"},
                    {"c4", wc.c4, "derived"},
                    {"c5", wc.c5, "stated"},
                    {"sup_weight_term", wc.sup_weight_term, "derived"},
                    {"lambda1_weight", wc.lambda1, "derived"},
                    {"C1", wc.C1, "derived"},
                    {"c8", wc.c8, "derived"},
                    {"c9", wc.c9, "derived"},
                    {"C2", wc.C2, "derived"},
                    {"C3q", wc.C3q, "derived"},
                    {"tail_exponent", wc.tail_exponent, "stated"},
                    {"loglog_slope", slope, "derived"}});
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int scenario_ou_modulus(const ScenarioContext& ctx) {
    const double sigma = ctx.num("sigma", 1.0);
    const double lambda = ctx.num("lambda", 1.0);
    const int grid_n = static_cast<int>(ctx.integer("grid_n", 128));
    const double level = ctx.num("level", 0.99);
    const std::vector<double> rs = ctx.list("r_list", "0.5,0.25,0.1");

    ReportBuilder rb("thm2_ou_modulus");
    std::vector<ConstantEntry> consts{{"delta_star", delta_star_root(), "stated"}};
    double prev_a = std::numeric_limits<double>::infinity();
    bool trend_ok = true;
    for (double r : rs) {
        DoublingModulusModel dm = example_catalog("ou", sigma, lambda);
        dm.r = r;
        const DoublingModulusResult res = doubling_modulus_pipeline(dm);
        trend_ok = trend_ok && res.a_r < prev_a && res.a_r > 1.0;
        prev_a = res.a_r;

        const std::vector<double> t = linspace(0.0, r, grid_n);
        std::vector<double> stats(static_cast<std::size_t>(ctx.replications));
        run_indexed(
            stats.size(),
            [&](std::size_t i) {
                RngStream rng(ctx.seed, 0x6d6f6475u ^ static_cast<std::uint64_t>(r * 1e6),
                              static_cast<std::uint64_t>(i));
                const auto path = simulate_ou(t, sigma, lambda, rng);
                double best = 0.0, running = 0.0;
                for (std::size_t j = 1; j < t.size(); ++j) {
                    running = std::max(running, std::abs(path[j] - path[0]));
                    const double den =
                        sigma *
                        std::sqrt(2.0 * t[j] * std::log1p(std::abs(std::log(t[j]))));
                    if (den > 0.0) best = std::max(best, running / den);
                }
                stats[i] = best;
            },
            ctx.threads);
        std::ostringstream name;
        name << "r=" << r;
        rb.add(name.str(), stats, res.a_r, res.bound, level);
        consts.push_back({"a(" + name.str() + ")", res.a_r, "derived"});
        consts.push_back({"8p(" + name.str() + ")", res.bound, "derived"});
        consts.push_back({"C(" + name.str() + ")", res.C, "derived"});
    }
    rb.add_info("a_trend_decreasing_gt1", trend_ok ? 1.0 : 0.0, 1.0, 1.0, trend_ok);
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_, consts);
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct KdeFamily {
    KernelLocalizedModel km;
    LocalizedAssembly la;
    Density f;
    std::vector<double> h, x;
    std::vector<HPoint> pts;  // flattened (h, x)
    double G_low = 0, F_sup = 0;
};

KdeFamily make_kde_family(int h_n, double h_min, double h_max, int x_n, double x_lo,
                          double x_hi, bool pointwise) {
    KdeFamily fam;
    fam.km = tri_kernel_model();
    fam.la = localized_model(fam.km, pointwise);
    fam.f = uniform_density();
    fam.h = geomspace(h_min, h_max, h_n);
    fam.x = x_n == 1 ? std::vector<double>{0.5 * (x_lo + x_hi)} : linspace(x_lo, x_hi, x_n);
    for (double h : fam.h)
        for (double x : fam.x) {
            HPoint pt;
            pt.h = {h};
            pt.g_inf = fam.km.K_sup / h;
            pt.F = localized_F(fam.km, fam.f, h, x);
            fam.pts.push_back(pt);
        }
    fam.G_low = fam.km.K_sup / h_max;
    fam.F_sup = 0.0;
    for (const auto& pt : fam.pts) fam.F_sup = std::max(fam.F_sup, pt.F);
    return fam;
}

int scenario_kde(const ScenarioContext& ctx) {
    const long n = ctx.integer("n", 512);
    const int h_n = static_cast<int>(ctx.integer("h_n", 16));
    const double h_min = ctx.num("h_min", 0.05), h_max = ctx.num("h_max", 0.4);
    const int x_n = static_cast<int>(ctx.integer("x_n", 4));
    const double q = ctx.num("q", 1.0);
    const double level = ctx.num("level", 0.99);
    const std::vector<double> us = ctx.list("u_list", "1,2,3");

    KdeFamily fam = make_kde_family(h_n, h_min, h_max, x_n, 0.3, 0.7, false);
    const EmpiricalConstants ec = structural_constants(1.0, 1.0, 2, 1, 2.0, 0, fam.la.moduli);

    KdeProcessSpec spec;
    spec.h = fam.h;
    spec.x = fam.x;
    spec.K1 = tri_kernel;
    spec.f = fam.f;
    spec.draw = [](RngStream& rng) { return rng.uniform(); };
    spec.n = n;
    const auto centering = kde_centering(spec);

    // One simulation pass; all thresholds evaluated on the stored fields.
    const std::size_t R = static_cast<std::size_t>(ctx.replications);
    std::vector<std::vector<double>> fields(R);
    run_indexed(
        R,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, 0x6b646533u, static_cast<std::uint64_t>(i));
            const auto xi = simulate_kde_process(spec, centering, rng);
            std::vector<double> flat;
            flat.reserve(fam.pts.size());
            for (std::size_t hi = 0; hi < fam.h.size(); ++hi)
                for (std::size_t xj = 0; xj < fam.x.size(); ++xj)
                    flat.push_back(std::abs(xi[hi][xj]));
            fields[i] = std::move(flat);
        },
        ctx.threads);

    ReportBuilder rb("thm3_kde");
    std::vector<ConstantEntry> consts{{"delta_star", ec.delta_star, "stated"},
                                      {"C_NRmk", ec.C_NRmk, "derived"},
                                      {"lambda1", ec.lambda1, "derived"},
                                      {"lambda2", ec.lambda2, "derived"},
                                      {"C_D", ec.C_D, "derived"},
                                      {"G_low", fam.G_low, "derived"},
                                      {"F_sup", fam.F_sup, "derived"}};
    for (double u : us) {
        const auto env = bounded_family_envelopes(
            ec, fam.pts, fam.G_low, fam.F_sup, n, n,
            std::numeric_limits<double>::infinity(), u, q, fam.la.Lk);
        std::vector<double> excess_v(R), excess_uq(R);
        for (std::size_t i = 0; i < R; ++i) {
            double wv = -std::numeric_limits<double>::infinity();
            double wu = -std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < fam.pts.size(); ++p) {
                wv = std::max(wv, fields[i][p] - env.V(p, static_cast<double>(n)));
                wu = std::max(wu, fields[i][p] - env.U(p, static_cast<double>(n)));
            }
            excess_v[i] = wv;
            excess_uq[i] = std::pow(pos(wu), q);
        }
        std::ostringstream name;
        name << "u=" << u;
        rb.add(name.str(), excess_v, 0.0, env.prob_bound, level);

        const double est = pairwise_sum(excess_uq) / static_cast<double>(R);
        const double upper = bootstrap_upper(excess_uq, level, ctx.seed, 0x6b646533u);
        rb.add_info("moment_" + name.str(), est, upper, env.moment_bound,
                    upper <= env.moment_bound);
        consts.push_back({"prob_bound(" + name.str() + ")", env.prob_bound, "stated"});
        consts.push_back({"moment_bound(" + name.str() + ")", env.moment_bound, "derived"});
    }
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_, consts);
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int scenario_lil(const ScenarioContext& ctx) {
    const long j_start = ctx.integer("j", 8);
    const long n_max = ctx.integer("n_max", 512);
    const double a = ctx.num("a", 3.0);
    const int h_n = static_cast<int>(ctx.integer("h_n", 16));
    // The top bandwidth sits high enough that the admissibility cap
    // n (ln n)^{-a} admits indices over the tail of the n-range.
    const double h_min = ctx.num("h_min", 0.05), h_max = ctx.num("h_max", 0.6);
    const double level = ctx.num("level", 0.99);

    KdeFamily fam = make_kde_family(h_n, h_min, h_max, 1, 0.5, 0.5, true);
    const double b_scale = 0.5 * (1.0 + 0.5 * a);  // midpoint of (1, a/2)
    const EmpiricalConstants ec =
        structural_constants(1.0, 1.0, 2, 1, b_scale, 1, fam.la.moduli);
    LilParams lp;
    lp.a = a;
    lp.c_frak = fam.km.K_sup / h_max;
    lp.b_frak = std::max(1.0, std::log(h_max / h_min) / std::log(3.0));
    lp.F_big = fam.la.F_bound;
    lp.a_frak = 0.0;
    const LilConstant lc = lil_constant(ec, lp);

    KdeLilTrackerSpec ts;
    ts.h = fam.h;
    ts.xbar = fam.x[0];
    ts.K1 = tri_kernel;
    ts.f = fam.f;
    ts.draw = [](RngStream& rng) { return rng.uniform(); };
    ts.K_sup = fam.km.K_sup;
    ts.a = a;
    ts.j_start = j_start;
    ts.n_max = n_max;
    KdeProcessSpec cs;
    cs.h = fam.h;
    cs.x = {ts.xbar};
    cs.K1 = tri_kernel;
    cs.f = fam.f;
    cs.n = 1;
    const auto centering = kde_centering(cs);

    std::vector<double> stats(static_cast<std::size_t>(ctx.replications));
    run_indexed(
        stats.size(),
        [&](std::size_t i) {
            RngStream rng(ctx.seed, 0x6c696c34u, static_cast<std::uint64_t>(i));
            stats[i] = lil_tracker_max(ts, centering, rng);
        },
        ctx.threads);

    ReportBuilder rb("thm4_lil");
    rb.add("j=" + std::to_string(j_start), stats, lc.upsilon,
           lc.bound(static_cast<double>(j_start)), level);
    double observed = 0.0;
    for (double s : stats) observed = std::max(observed, s);
    rb.add_info("margin_to_upsilon", lc.upsilon - observed, 0.0, lc.upsilon,
                observed <= lc.upsilon);
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_,
                   {{"upsilon", lc.upsilon, "derived"},
                    {"upsilon1", lc.u1, "derived"},
                    {"upsilon2", lc.u2, "derived"},
                    {"upsilon3", lc.u3, "derived"},
                    {"bound", lc.bound(static_cast<double>(j_start)), "stated"},
                    {"observed_max", observed, "derived"},
                    {"delta_star", ec.delta_star, "stated"},
                    {"C_NRmk", ec.C_NRmk, "derived"},
                    {"lambda1", ec.lambda1, "derived"},
                    {"lambda2", ec.lambda2, "derived"}});
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int scenario_localized_pointwise(const ScenarioContext& ctx) {
    const long n1 = ctx.integer("n1", 384);
    const long n2 = ctx.integer("n2", 512);
    const int r_n = static_cast<int>(ctx.integer("r_n", 12));
    const double r_min = ctx.num("r_min", 0.05), r_max = ctx.num("r_max", 0.4);
    const double xbar = ctx.num("xbar", 0.5);
    const double q = ctx.num("q", 1.0);
    const double b_scale = ctx.num("b", 2.0);
    const double level = ctx.num("level", 0.99);
    const std::vector<double> us = ctx.list("u_list", "1,2,3");

    KernelLocalizedModel km = tri_kernel_model();
    LocalizedAssembly la = localized_model(km, true);
    Density f = uniform_density();
    const int chi = n1 == n2 ? 0 : 1;
    const EmpiricalConstants ec = structural_constants(1.0, 1.0, 2, 1, b_scale, chi, la.moduli);

    const std::vector<double> rs = geomspace(r_min, r_max, r_n);
    std::vector<std::vector<double>> r_grid;
    std::vector<double> Fv;
    for (double r : rs) {
        r_grid.push_back({r});
        Fv.push_back(localized_F(km, f, r, xbar));
    }

    KdeProcessSpec cs;
    cs.h = rs;
    cs.x = {xbar};
    cs.K1 = tri_kernel;
    cs.f = f;
    cs.n = 1;
    const auto centering = kde_centering(cs);
    const std::vector<long> checkpoints{n1, (n1 + n2) / 2, n2};

    // Simulate once; store zeta at every (checkpoint, r).
    const std::size_t R = static_cast<std::size_t>(ctx.replications);
    std::vector<std::vector<double>> zeta(R);
    run_indexed(
        R,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, 0x7468376cu, static_cast<std::uint64_t>(i));
            std::vector<double> running(rs.size(), 0.0);
            std::vector<double> out;
            out.reserve(rs.size() * checkpoints.size());
            long n = 0;
            for (long cp : checkpoints) {
                for (; n < cp; ++n) {
                    const double xv = rng.uniform();
                    for (std::size_t ri = 0; ri < rs.size(); ++ri) {
                        const double u = (xv - xbar) / rs[ri];
                        if (std::abs(u) <= 1.0) running[ri] += tri_kernel(u) / rs[ri];
                    }
                }
                for (std::size_t ri = 0; ri < rs.size(); ++ri)
                    out.push_back(std::abs(running[ri] / static_cast<double>(cp) -
                                           centering[ri][0]));
            }
            zeta[i] = std::move(out);
        },
        ctx.threads);

    ReportBuilder rb("thm7_pointwise");
    std::vector<ConstantEntry> consts{{"delta_star", ec.delta_star, "stated"},
                                      {"C_NRmk", ec.C_NRmk, "derived"},
                                      {"lambda1", ec.lambda1, "derived"},
                                      {"lambda2", ec.lambda2, "derived"},
                                      {"c_b", ec.c_b, "stated"},
                                      {"C_Db", ec.C_Db, "derived"}};
    for (double u : us) {
        const auto env = localized_pointwise_envelopes(
            ec, la, r_grid, Fv, {r_max}, n1, n2, std::numeric_limits<double>::infinity(), u,
            q);
        std::vector<double> excess_v(R), excess_uq(R);
        for (std::size_t i = 0; i < R; ++i) {
            double wv = -std::numeric_limits<double>::infinity();
            double wu = -std::numeric_limits<double>::infinity();
            std::size_t idx = 0;
            for (long cp : checkpoints)
                for (std::size_t ri = 0; ri < rs.size(); ++ri, ++idx) {
                    const double nd = static_cast<double>(cp);
                    wv = std::max(wv, zeta[i][idx] - env.V(ri, nd));
                    wu = std::max(wu, zeta[i][idx] - env.U(ri, nd));
                }
            excess_v[i] = wv;
            excess_uq[i] = std::pow(pos(wu), q);
        }
        std::ostringstream name;
        name << "u=" << u;
        rb.add(name.str(), excess_v, 0.0, env.prob_bound, level);
        const double est = pairwise_sum(excess_uq) / static_cast<double>(R);
        const double upper = bootstrap_upper(excess_uq, level, ctx.seed, 0x7468376cu);
        rb.add_info("moment_" + name.str(), est, upper, env.moment_bound,
                    upper <= env.moment_bound);
    }
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_, consts);
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int scenario_supnorm(const ScenarioContext& ctx) {
    const long n = ctx.integer("n", 512);
    const int r_n = static_cast<int>(ctx.integer("r_n", 8));
    const double r_min = ctx.num("r_min", 0.05), r_max = ctx.num("r_max", 0.4);
    const int x_n = static_cast<int>(ctx.integer("x_n", 16));
    const double v = ctx.num("v", 3.0);
    const double q = ctx.num("q", 1.0);
    const double level = ctx.num("level", 0.99);
    const std::vector<double> zs = ctx.list("z_list", "1,2");

    KernelLocalizedModel km = tri_kernel_model();
    LocalizedAssembly la = localized_model(km, false);
    Density f = uniform_density();
    const EmpiricalConstants ec = structural_constants(1.0, 1.0, 2, 1, 2.0, 0, la.moduli);
    const CoverRd cover = lattice_cover(1, 1.0);

    const auto sc = support_check(
        km, [&](long) { return std::vector<double>{r_max}; }, 1.0, 3, n);
    if (!sc.ok) throw numeric_guard_error("thm9_supnorm: kernel support check failed");

    const std::vector<double> rs = geomspace(r_min, r_max, r_n);
    const std::vector<double> xs = linspace(0.2, 0.8, x_n);
    std::vector<std::vector<double>> r_grid;
    std::vector<double> Fv;
    for (double r : rs) {
        r_grid.push_back({r});
        double worst = 0.0;
        for (double x : xs) worst = std::max(worst, localized_F(km, f, r, x));
        Fv.push_back(worst);
    }

    KdeProcessSpec spec;
    spec.h = rs;
    spec.x = xs;
    spec.K1 = tri_kernel;
    spec.f = f;
    spec.draw = [](RngStream& rng) { return rng.uniform(); };
    spec.n = n;
    const auto centering = kde_centering(spec);

    const std::size_t R = static_cast<std::size_t>(ctx.replications);
    std::vector<std::vector<double>> sup_field(R);
    run_indexed(
        R,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, 0x74683973u, static_cast<std::uint64_t>(i));
            const auto xi = simulate_kde_process(spec, centering, rng);
            std::vector<double> per_r(rs.size(), 0.0);
            for (std::size_t ri = 0; ri < rs.size(); ++ri)
                for (std::size_t xj = 0; xj < xs.size(); ++xj)
                    per_r[ri] = std::max(per_r[ri], std::abs(xi[ri][xj]));
            sup_field[i] = std::move(per_r);
        },
        ctx.threads);

    ReportBuilder rb("thm9_supnorm");
    std::vector<ConstantEntry> consts{{"delta_star", ec.delta_star, "stated"},
                                      {"C_NRmk", ec.C_NRmk, "derived"},
                                      {"lambda1", ec.lambda1, "derived"},
                                      {"lambda2", ec.lambda2, "derived"},
                                      {"n_overlap", cover.n_overlap, "stated"},
                                      {"support_worst_ratio", sc.worst_ratio, "derived"}};
    for (double z : zs) {
        const auto env = localized_supnorm_envelopes(ec, la, r_grid, Fv, {r_max}, {r_min}, n,
                                                     n, cover.n_overlap, v, z, q);
        std::vector<double> excess(R);
        for (std::size_t i = 0; i < R; ++i) {
            double w = -std::numeric_limits<double>::infinity();
            for (std::size_t ri = 0; ri < rs.size(); ++ri)
                w = std::max(w, sup_field[i][ri] - env.U_hat(ri, static_cast<double>(n)));
            excess[i] = w;
        }
        std::ostringstream name;
        name << "z=" << z;
        rb.add(name.str(), excess, 0.0, env.prob_bound, level);
        consts.push_back({"C_big(" + name.str() + ")", env.C_big, "derived"});
        consts.push_back({"prob_bound(" + name.str() + ")", env.prob_bound, "stated"});
    }
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_, consts);
    return rb.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int scenario_ll(const ScenarioContext& ctx) {
    const long j_start = ctx.integer("j", 8);
    const long n_max = ctx.integer("n_max", 512);
    const double a = ctx.num("a", 5.0);
    const int r_n = static_cast<int>(ctx.integer("r_n", 8));
    const double r_min = ctx.num("r_min", 0.05), r_max = ctx.num("r_max", 0.4);
    const int x_n = static_cast<int>(ctx.integer("x_n", 16));
    const double level = ctx.num("level", 0.99);

    KernelLocalizedModel km = tri_kernel_model();
    LocalizedAssembly la = localized_model(km, false);
    Density f = uniform_density();
    const double b_scale = 0.5 * (1.0 + (0.5 * a - 1.0));  // midpoint of (1, a/2 - 1)
    const EmpiricalConstants ec = structural_constants(1.0, 1.0, 2, 1, b_scale, 1, la.moduli);
    const CoverRd cover = lattice_cover(1, 1.0);

    LlParams lp;
    lp.a = a;
    lp.c_frak = la.gK;
    lp.b_frak = std::max(1.0, std::log(1.0 / r_min) / std::log(3.0));
    lp.F_big = la.F_bound;
    lp.Lk = la.Lk;
    const double upsilon = ll_constant(ec, lp);

    KdeLlTrackerSpec ts;
    ts.r = geomspace(r_min, r_max, r_n);
    ts.xbar = linspace(0.2, 0.8, x_n);
    ts.K1 = tri_kernel;
    ts.f = f;
    ts.draw = [](RngStream& rng) { return rng.uniform(); };
    ts.a = a;
    ts.j_start = j_start;
    ts.n_max = n_max;
    KdeProcessSpec cs;
    cs.h = ts.r;
    cs.x = ts.xbar;
    cs.K1 = tri_kernel;
    cs.f = f;
    cs.n = 1;
    const auto centering = kde_centering(cs);

    std::vector<double> stats(static_cast<std::size_t>(ctx.replications));
    run_indexed(
        stats.size(),
        [&](std::size_t i) {
            RngStream rng(ctx.seed, 0x6c6c3130u, static_cast<std::uint64_t>(i));
            stats[i] = ll_tracker_max(ts, centering, rng);
        },
        ctx.threads);

    const double bound = 4840.0 * std::pow(cover.n_overlap, 5.0) /
                         std::log(static_cast<double>(j_start));
    ReportBuilder rb("thm10_ll");
    rb.add("j=" + std::to_string(j_start), stats, upsilon, bound, level);
    double observed = 0.0;
    for (double s : stats) observed = std::max(observed, s);
    rb.add_info("margin_to_upsilon", upsilon - observed, 0.0, upsilon, observed <= upsilon);
    rb.write(ctx);
    write_manifest(ctx, rb.scenario_,
                   {{"upsilon", upsilon, "derived"},
                    {"bound", bound, "stated"},
                    {"observed_max", observed, "derived"},
                    {"n_overlap", cover.n_overlap, "stated"},
                    {"delta_star", ec.delta_star, "stated"},
                    {"C_NRmk", ec.C_NRmk, "derived"},
                    {"lambda1", ec.lambda1, "derived"},
                    {"lambda2", ec.lambda2, "derived"}});
    return rb.all_pass ? 0 : 1;
}

struct ScenarioEntry {
    const char* name;
    int (*fn)(const ScenarioContext&);
};

constexpr ScenarioEntry kScenarios[] = {
    {"prop1_gaussian_grid", scenario_prop1},
    {"thm1_wiener_lp", scenario_wiener},
    {"thm2_ou_modulus", scenario_ou_modulus},
    {"thm3_kde", scenario_kde},
    {"thm4_lil", scenario_lil},
    {"thm7_pointwise", scenario_localized_pointwise},
    {"thm9_supnorm", scenario_supnorm},
    {"thm10_ll", scenario_ll},
};

}  // namespace

double ScenarioContext::num(const std::string& key, double fallback) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) it = cfg.find("params." + key);
    return it == cfg.end() ? fallback : parse_num(it->second);
}

long ScenarioContext::integer(const std::string& key, long fallback) const {
    return static_cast<long>(num(key, static_cast<double>(fallback)));
}

std::vector<double> ScenarioContext::list(const std::string& key,
                                          const std::string& fallback) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) it = cfg.find("params." + key);
    const std::string& s = it == cfg.end() ? fallback : it->second;
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_num(item));
    }
    return out;
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> names;
    for (const auto& e : kScenarios) names.push_back(e.name);
    return names;
}

bool have_scenario(const std::string& name) {
    for (const auto& e : kScenarios)
        if (name == e.name) return true;
    return false;
}

int run_scenario(const std::string& name, const ScenarioContext& ctx) {
    for (const auto& e : kScenarios)
        if (name == e.name) return e.fn(ctx);
    throw std::invalid_argument("unknown scenario: " + name);
}

}  // namespace upfn::cli
