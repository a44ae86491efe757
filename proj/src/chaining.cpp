#include "upfn/chaining.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "upfn/rng.hpp"

namespace upfn {

double TailModel::A_sup() const { return *std::max_element(A.begin(), A.end()); }
double TailModel::A_inf() const { return *std::min_element(A.begin(), A.end()); }
double TailModel::B_sup() const { return b_zero ? 0.0 : *std::max_element(B.begin(), B.end()); }
double TailModel::B_inf() const { return b_zero ? 0.0 : *std::min_element(B.begin(), B.end()); }

double metric_diameter(int n, const Metric& d) {
    double diam = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) diam = std::max(diam, d(i, j));
    return diam;
}

void spot_check_semimetrics(const TailModel& m, int trials, std::uint64_t seed) {
    const int n = m.size();
    if (n < 2) return;
    RngStream rng(seed, 0x61786d73u, 0);
    const double tol = 1e-9;
    auto check_one = [&](const Metric& d, const char* name) {
        for (int t = 0; t < trials; ++t) {
            const int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
            const double dij = d(i, j), dji = d(j, i), dik = d(i, k), dkj = d(k, j);
            if (!(dij >= 0.0) || std::abs(dij - dji) > tol * (1.0 + std::abs(dij)) ||
                dij > dik + dkj + tol * (1.0 + dij) || std::abs(d(i, i)) > tol)
                throw std::domain_error(std::string("spot_check_semimetrics: '") + name +
                                        "' fails on triple (" + std::to_string(i) + "," +
                                        std::to_string(j) + "," + std::to_string(k) + ")");
        }
    };
    check_one(m.a, "a");
    if (!m.b_zero) check_one(m.b, "b");
}

namespace {

double capacity_sweep(const WeightFunction& s, double kappa, const EntropyProvider& E,
                      int delta_power, int J, bool* at_boundary) {
    const auto value_at = [&](double log2_delta) {
        const double delta = std::exp2(log2_delta);
        const double arg = kappa / (48.0 * delta) * s(delta);
        if (!(arg > 0.0)) return 0.0;
        return std::pow(delta, -delta_power) * E(arg);
    };
    double best = 0.0;
    int best_j = 0;
    for (int j = -J; j <= J; ++j) {
        const double val = value_at(0.5 * j);
        if (val > best) {
            best = val;
            best_j = j;
        }
    }
    *at_boundary = best > 0.0 && std::abs(best_j) == J;
    if (*at_boundary || best == 0.0) return best;
    // Densify around the coarse argmax so the supremum is resolved well below
    // the half-octave granularity of the dyadic ladder.
    double centre = 0.5 * best_j;
    double width = 0.5;
    for (int pass = 0; pass < 3; ++pass) {
        double local_best = best;
        double local_arg = centre;
        for (int i = -160; i <= 160; ++i) {
            const double x = centre + width * i / 160.0;
            const double val = value_at(x);
            if (val > local_best) {
                local_best = val;
                local_arg = x;
            }
        }
        best = local_best;
        centre = local_arg;
        width /= 80.0;
    }
    return best;
}

}  // namespace

double capacity_term(const WeightFunction& s, double kappa, const EntropyProvider& E,
                     int delta_power, const CapacityOptions& opt) {
    if (kappa < 0.0) throw std::domain_error("capacity_term: kappa must be >= 0");
    if (kappa == 0.0) return 0.0;  // degenerate-metric convention
    bool boundary = false;
    double v = capacity_sweep(s, kappa, E, delta_power, opt.j_half_range, &boundary);
    if (boundary) {
        v = capacity_sweep(s, kappa, E, delta_power, 2 * opt.j_half_range, &boundary);
        if (boundary)
            throw numeric_guard_error(
                "chaining capacity: supremum attained at grid boundary, possibly infinite");
    }
    return v;
}

double chaining_capacity(const WeightFunction& s1, const WeightFunction& s2,
                         std::pair<double, double> kappa, const EntropyProvider& Ea,
                         const EntropyProvider& Eb, const CapacityOptions& opt) {
    return capacity_term(s1, kappa.first, Ea, 2, opt) +
           capacity_term(s2, kappa.second, Eb, 1, opt);
}

double u_eps_s(double y, std::pair<double, double> kappa, double e, double eps) {
    if (!(y >= 0.0) || !(e >= 0.0) || kappa.first < 0.0 || kappa.second < 0.0)
        throw std::domain_error("u_eps_s: negative input");
    if (!(eps > 0.0)) throw std::domain_error("u_eps_s: eps must be > 0");
    const double inner = 2.0 * sq(1.0 + 1.0 / eps) * e + y;
    return kappa.first * std::sqrt(inner) + kappa.second * inner;
}

double suprema_probability_bound(double c, double eps, double y) {
    if (!(y >= 1.0)) throw std::domain_error("suprema_probability_bound: y must be >= 1");
    if (!(eps > 0.0) || eps > kSqrt2Minus1 + 1e-12)
        throw std::domain_error("suprema_probability_bound: eps outside (0, sqrt(2)-1]");
    return 2.0 * c * std::exp(-y / sq(1.0 + eps));
}

double suprema_moment_bound(double c, double eps, double y, double q, double U) {
    if (!(q >= 1.0)) throw std::domain_error("suprema_moment_bound: q must be >= 1");
    const double p = suprema_probability_bound(c, eps, y);
    return p * gamma_fn(q + 1.0) * std::pow(sq(1.0 + eps) / y * U, q);
}

// ---------------------------------------------------------------------------

namespace {

// Level sets of A (or B) are prefixes of the indices sorted by the value, so
// the per-theta capacities reduce to capacities per distinct cut point.
class LevelSetCapacity {
public:
    LevelSetCapacity(const std::vector<double>& values, const Metric& metric,
                     const WeightFunction& s, int delta_power, const CapacityOptions& opt)
        : values_(values), metric_(metric), s_(s), power_(delta_power), opt_(opt) {
        order_.resize(values.size());
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](int i, int j) { return values[i] < values[j]; });
    }

    // e_s(kappa, {theta : value(theta) <= t})
    double operator()(double kappa, double t) {
        std::size_t cut = 0;
        while (cut < order_.size() && values_[order_[cut]] <= t) ++cut;
        if (cut == 0) return 0.0;
        return capacity_term(s_, kappa, provider_for(cut), power_, opt_);
    }

private:
    const EntropyProvider& provider_for(std::size_t cut) {
        auto it = cache_.find(cut);
        if (it == cache_.end()) {
            std::vector<int> subset(order_.begin(), order_.begin() + static_cast<long>(cut));
            std::sort(subset.begin(), subset.end());
            it = cache_.emplace(cut, EntropyProvider::greedy_finite(subset, metric_)).first;
        }
        return it->second;
    }

    std::vector<double> values_;
    Metric metric_;
    WeightFunction s_;
    int power_;
    CapacityOptions opt_;
    std::vector<int> order_;
    std::map<std::size_t, EntropyProvider> cache_;
};

}  // namespace

FirstTypeResult first_type_envelopes(const TailModel& m, const WeightFunction& s1,
                                     const WeightFunction& s2, double eps, double z,
                                     double q, const FirstTypeOptions& opt) {
    if (!(eps > 0.0) || eps > kSqrt2Minus1 + 1e-12)
        throw std::domain_error("first_type_envelopes: eps outside (0, sqrt(2)-1]");
    if (!(z >= 1.0)) throw std::domain_error("first_type_envelopes: z must be >= 1");
    if (!(q >= 1.0)) throw std::domain_error("first_type_envelopes: q must be >= 1");
    const int n = m.size();
    if (n == 0) throw std::domain_error("first_type_envelopes: empty index set");

    const double A_low = m.A_inf();
    if (!(A_low > 0.0))
        throw std::domain_error("first_type_envelopes: requires inf A > 0");
    const double B_low = m.b_zero ? 0.0 : m.B_inf();
    if (!m.b_zero && !(B_low > 0.0))
        throw std::domain_error("first_type_envelopes: requires inf B > 0 (or b == 0)");

    LevelSetCapacity cap_a(m.A, m.a, s1, 2, opt.capacity);
    std::optional<LevelSetCapacity> cap_b;
    if (!m.b_zero) cap_b.emplace(m.B, m.b, s2, 1, opt.capacity);

    auto E = [&](double u, double v) {
        if (opt.e_override) return (*opt.e_override)(u, v);
        double e = cap_a(A_low * u, A_low * u);
        if (!m.b_zero) e += (*cap_b)(B_low * v, B_low * v);
        return e;
    };

    FirstTypeResult res;
    res.e_overridden = opt.e_override.has_value();
    res.V.resize(static_cast<std::size_t>(n));
    res.U.resize(static_cast<std::size_t>(n));
    res.P.resize(static_cast<std::size_t>(n));
    res.M.resize(static_cast<std::size_t>(n));

    const double one_eps = 1.0 + eps;
    const double chain_coef = 2.0 * sq(1.0 + 1.0 / eps);
    for (int i = 0; i < n; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double Au = one_eps * m.A[ii] / A_low;
        const double Bv = m.b_zero ? 1.0 : one_eps * m.B[ii] / B_low;
        const double e = E(Au, Bv);
        const double log_term = m.b_zero ? ell(Au) : ell(Au) + ell(Bv);
        const double log_prod = m.b_zero ? std::log(Au) : std::log(Au * Bv);
        res.P[ii] = chain_coef * e + sq(one_eps) * log_term;
        res.M[ii] = sq(one_eps) * (chain_coef * e + (eps + q) * log_prod);
        const double vp = res.P[ii] + sq(one_eps) * z;
        const double vm = res.M[ii] + sq(one_eps) * z;
        res.V[ii] = sq(one_eps) * (m.A[ii] * std::sqrt(vp) + (m.b_zero ? 0.0 : m.B[ii] * vp));
        res.U[ii] = sq(one_eps) * (m.A[ii] * std::sqrt(vm) + (m.b_zero ? 0.0 : m.B[ii] * vm));
    }

    const double w = std::log1p(std::log(one_eps));
    res.prob_bound = 2.0 * m.c * sq(1.0 + 1.0 / sq(w)) * std::exp(-z);
    const double scale = std::max(A_low, B_low);
    res.moment_bound = m.c * std::pow(2.0, 2.5 * q + 2.0) * gamma_fn(q + 1.0) *
                       std::pow(eps, -q - 4.0) * std::pow(scale, q) * std::exp(-z);
    return res;
}

// ---------------------------------------------------------------------------

namespace {

double default_R(const PartitionFamily& fam, double eps, double r, double u, double v) {
    if (r == 0.0) {
        double val = ell(std::max(1.0, fam.tau1_bar / u));
        if (fam.has_b) val += ell(std::max(1.0, fam.tau2_bar / v));
        return val;
    }
    double val = pos(std::log(fam.tau1_bar / u));
    if (fam.has_b) val += pos(std::log(fam.tau2_bar / v));
    return eps * val;
}

// Number of geometric scales covering [tau_low, tau_bar]; -1 when unbounded.
long scale_count(double bar, double low, double log1e) {
    if (!(low > 0.0)) return -1;
    return static_cast<long>(std::floor(std::log(bar / low) / log1e)) + 1;
}

// sum_j exp{-ell((1+eps)^j)} truncated at N plus an integral tail bound.
double default_axis_sum_r0(double eps, long J) {
    const double a = std::log1p(eps);
    const long cap = 100000;
    const long n = (J < 0) ? cap : J;
    double s = 0.0;
    for (long j = 0; j <= n; ++j)
        s += std::exp(-ell(std::max(1.0, std::pow(1.0 + eps, static_cast<double>(j)))));
    if (J < 0) s += (1.0 / a) / (1.0 + std::log(a * static_cast<double>(cap)));
    return s;
}

// sum_{j,k} [g_A(tau1_bar d_j) v g_B(tau2_bar d_k)]^r exp{-R_r(...)} with
// d_j = (1+eps)^{-j}.
double r_sum(const PartitionFamily& fam, double eps, double r) {
    const double log1e = std::log1p(eps);
    const long J = scale_count(fam.tau1_bar, fam.tau1_low, log1e);
    const long K = fam.has_b ? scale_count(fam.tau2_bar, fam.tau2_low, log1e) : 0;

    if (!fam.R && r == 0.0) {
        // Default family at r = 0 factorises across the two axes.
        double s = default_axis_sum_r0(eps, J);
        if (fam.has_b) s *= default_axis_sum_r0(eps, K);
        return s;
    }

    const auto R = [&](double rr, double u, double v) {
        return fam.R ? fam.R(rr, u, v) : default_R(fam, eps, rr, u, v);
    };
    const long cap = 200000;
    const long Jn = (J < 0) ? cap : J;
    const long Kn = (K < 0) ? cap : K;

    double total = 0.0;
    bool j_converged = (J >= 0);
    for (long j = 0; j <= Jn; ++j) {
        const double u = fam.tau1_bar * std::pow(1.0 + eps, -static_cast<double>(j));
        double row = 0.0;
        bool k_converged = (K >= 0);
        for (long k = 0; k <= Kn; ++k) {
            const double v =
                fam.has_b ? fam.tau2_bar * std::pow(1.0 + eps, -static_cast<double>(k)) : 1.0;
            double g = fam.g_A(u);
            if (fam.has_b) g = std::max(g, fam.g_B(v));
            const double term = std::pow(std::max(g, 0.0), r) * std::exp(-R(r, u, v));
            row += term;
            if (K < 0 && k > 64 && term < 1e-14 * std::max(row, 1e-300)) {
                k_converged = true;
                break;
            }
        }
        if (!k_converged)
            throw numeric_guard_error(
                "second_type_envelope: inner R-family sum fails the summability condition");
        total += row;
        if (J < 0 && j > 64 && row < 1e-14 * std::max(total, 1e-300)) {
            j_converged = true;
            break;
        }
    }
    if (!j_converged)
        throw numeric_guard_error(
            "second_type_envelope: R-family sum fails the summability condition");
    if (!std::isfinite(total))
        throw numeric_guard_error("second_type_envelope: divergent R-family sum");
    return total;
}

}  // namespace

SecondTypeResult second_type_envelope(const PartitionFamily& fam, double eps, double z,
                                      double q) {
    if (!(eps > 0.0) || eps > std::sqrt(2.0) + 1e-12)
        throw std::domain_error("second_type_envelope: eps outside (0, sqrt(2)]");
    if (!(z >= 1.0)) throw std::domain_error("second_type_envelope: z must be >= 1");
    if (!(q >= 1.0)) throw std::domain_error("second_type_envelope: q must be >= 1");
    if (fam.lambda1 < 1.0 || fam.lambda2 < 1.0)
        throw std::domain_error("second_type_envelope: lambda factors must be >= 1");

    SecondTypeResult res;
    res.R_sum0 = r_sum(fam, eps, 0.0);
    res.R_sumq = r_sum(fam, eps, q);

    const auto R = [&](double rr, double u, double v) {
        return fam.R ? fam.R(rr, u, v) : default_R(fam, eps, rr, u, v);
    };

    const double one_eps = 1.0 + eps;
    const double chain_coef = 2.0 * sq(1.0 + 1.0 / eps);
    res.U_hat.resize(static_cast<std::size_t>(fam.n_alpha));
    for (int al = 0; al < fam.n_alpha; ++al) {
        const double t1 = fam.tau1(al);
        const double t2 = fam.has_b ? fam.tau2(al) : 0.0;
        const double u = one_eps * t1;
        const double v = fam.has_b ? one_eps * t2 : 1.0;

        WeightFunction w1{[&fam, u](double x) { return fam.s1(u, x); }, 1.0, true};
        double ehat = capacity_term(
            w1, fam.g_A(u) / fam.lambda1,
            EntropyProvider::closed_form([&fam, u](double arg) { return fam.entropy1(u, arg); }),
            2, fam.capacity);
        if (fam.has_b) {
            WeightFunction w2{[&fam, v](double x) { return fam.s2(v, x); }, 1.0, true};
            ehat += capacity_term(w2, fam.g_B(v) / fam.lambda2,
                                  EntropyProvider::closed_form(
                                      [&fam, v](double arg) { return fam.entropy2(v, arg); }),
                                  1, fam.capacity);
        }
        const double rhat = R(0.0, u, v);
        const double inner = chain_coef * ehat + rhat + z;
        double env = one_eps * fam.g_A(sq(one_eps) * t1) * std::sqrt(inner);
        if (fam.has_b) env += sq(one_eps) * fam.g_B(sq(one_eps) * t2) * inner;
        res.U_hat[static_cast<std::size_t>(al)] = env;
    }

    res.prob_bound = 2.0 * fam.tail_c * res.R_sum0 * std::exp(-z);
    res.moment_bound = fam.tail_c * std::pow(2.0, 2.5 * q + 1.0) * gamma_fn(q + 1.0) *
                       res.R_sumq * std::pow(eps, -q) * std::exp(-z);
    return res;
}

// ---------------------------------------------------------------------------

ModulusResult local_modulus_envelope(const TailModel& m, const Metric& d, int theta0,
                                     const std::vector<double>& delta_grid,
                                     const WeightFunction& s1, const WeightFunction& s2,
                                     double eps, double z, bool d_equals_a,
                                     const CapacityOptions& opt) {
    if (!(eps > 0.0)) throw std::domain_error("local_modulus_envelope: eps must be > 0");
    if (!(z >= 1.0)) throw std::domain_error("local_modulus_envelope: z must be >= 1");
    const int n = m.size();
    if (theta0 < 0 || theta0 >= n)
        throw std::domain_error("local_modulus_envelope: theta0 outside index set");
    const double diam = metric_diameter(n, d);

    auto g_of = [&](double u, bool b_side) {
        double g = 0.0;
        for (int i = 0; i < n; ++i)
            if (d(theta0, i) <= u) g = std::max(g, b_side ? m.b(theta0, i) : m.a(theta0, i));
        return g;
    };

    ModulusResult res;
    res.V_hat.resize(delta_grid.size());
    const double one_eps = 1.0 + eps;

    std::map<std::size_t, EntropyProvider> cache_a, cache_b;
    for (std::size_t gi = 0; gi < delta_grid.size(); ++gi) {
        const double Delta = delta_grid[gi];
        if (!(Delta > 0.0) || Delta > diam * (1.0 + 1e-12))
            throw std::domain_error("local_modulus_envelope: Delta outside (0, diameter]");

        std::vector<int> ball;
        for (int i = 0; i < n; ++i)
            if (d(theta0, i) <= one_eps * Delta) ball.push_back(i);
        const std::size_t key = ball.size();  // balls are nested, size identifies the subset
        auto ita = cache_a.find(key);
        if (ita == cache_a.end())
            ita = cache_a.emplace(key, EntropyProvider::greedy_finite(ball, m.a)).first;
        const double kappa_a = d_equals_a ? one_eps * Delta : g_of(one_eps * Delta, false);
        const double ehat_a = capacity_term(s1, kappa_a, ita->second, 2, opt);

        if (m.b_zero) {
            const double ga = d_equals_a ? sq(one_eps) * Delta : g_of(sq(one_eps) * Delta, false);
            const double inner = 4.0 * sq(1.0 + 1.0 / eps) * ehat_a +
                                 sq(one_eps) * (ell(std::max(1.0, diam / Delta)) + z);
            res.V_hat[gi] = one_eps * ga * std::sqrt(inner);
        } else {
            auto itb = cache_b.find(key);
            if (itb == cache_b.end())
                itb = cache_b.emplace(key, EntropyProvider::greedy_finite(ball, m.b)).first;
            const double ehat =
                ehat_a + capacity_term(s2, g_of(one_eps * Delta, true), itb->second, 1, opt);
            const double inner = 2.0 * sq(1.0 + 1.0 / eps) * ehat +
                                 sq(one_eps) * (2.0 * ell(std::max(1.0, diam / Delta)) + z);
            res.V_hat[gi] = one_eps * g_of(sq(one_eps) * Delta, false) * std::sqrt(inner) +
                            sq(one_eps) * g_of(sq(one_eps) * Delta, true) * inner;
        }
    }

    const double w = std::log1p(std::log(one_eps));
    const double base = 2.0 + 1.0 / sq(w);
    res.prob_bound = 4.0 * m.c * (m.b_zero ? base : sq(base)) * std::exp(-z);
    return res;
}

ModulusResult global_modulus_envelope(const TailModel& m, const Metric& d,
                                      const std::vector<double>& delta_grid,
                                      const WeightFunction& s1, const WeightFunction& s2,
                                      double eps, double z, const CapacityOptions& opt) {
    if (!(eps > 0.0)) throw std::domain_error("global_modulus_envelope: eps must be > 0");
    if (!(z >= 1.0)) throw std::domain_error("global_modulus_envelope: z must be >= 1");
    const int n = m.size();
    const double diam = metric_diameter(n, d);

    // Pair model: A(p) = a(t1, t2), doubled metrics, doubled tail constant.
    // The pair entropy is bounded by twice the base entropy at half radius.
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const EntropyProvider base_a = EntropyProvider::greedy_finite(all, m.a);
    const EntropyProvider pair_a = EntropyProvider::closed_form(
        [base_a](double arg) { return 2.0 * base_a(arg / 2.0); }, 2.0 * base_a.diameter());
    EntropyProvider pair_b;
    if (!m.b_zero) {
        const EntropyProvider base_b = EntropyProvider::greedy_finite(all, m.b);
        pair_b = EntropyProvider::closed_form(
            [base_b](double arg) { return 2.0 * base_b(arg / 2.0); }, 2.0 * base_b.diameter());
    }

    auto g_of = [&](double u, bool b_side) {
        double g = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                if (d(i, j) <= u) g = std::max(g, b_side ? m.b(i, j) : m.a(i, j));
        return g;
    };

    ModulusResult res;
    res.V_hat.resize(delta_grid.size());
    const double one_eps = 1.0 + eps;
    for (std::size_t gi = 0; gi < delta_grid.size(); ++gi) {
        const double Delta = delta_grid[gi];
        if (!(Delta > 0.0) || Delta > diam * (1.0 + 1e-12))
            throw std::domain_error("global_modulus_envelope: Delta outside (0, diameter]");
        const double gA1 = g_of(one_eps * Delta, false);
        double ehat = capacity_term(s1, gA1, pair_a, 2, opt);
        if (m.b_zero) {
            const double inner = 4.0 * sq(1.0 + 1.0 / eps) * ehat +
                                 sq(one_eps) * (ell(std::max(1.0, diam / Delta)) + z);
            res.V_hat[gi] = one_eps * g_of(sq(one_eps) * Delta, false) * std::sqrt(inner);
        } else {
            ehat += capacity_term(s2, g_of(one_eps * Delta, true), pair_b, 1, opt);
            const double inner = 2.0 * sq(1.0 + 1.0 / eps) * ehat +
                                 sq(one_eps) * (2.0 * ell(std::max(1.0, diam / Delta)) + z);
            res.V_hat[gi] = one_eps * g_of(sq(one_eps) * Delta, false) * std::sqrt(inner) +
                            sq(one_eps) * g_of(sq(one_eps) * Delta, true) * inner;
        }
    }

    const double w = std::log1p(std::log(one_eps));
    const double base = 2.0 + 1.0 / sq(w);
    const double c2 = 2.0 * m.c;  // tail constant of the pair model
    res.prob_bound = 4.0 * c2 * (m.b_zero ? base : sq(base)) * std::exp(-z);
    return res;
}

}  // namespace upfn
