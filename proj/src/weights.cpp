#include "upfn/weights.hpp"

#include <cmath>

namespace upfn {

namespace {
constexpr double kSixOverPiSq = 0.6079271018540267;
constexpr double kCertMargin = 1e-9;
}  // namespace

double eval_s_star(double x) {
    if (!(x > 0.0)) throw std::domain_error("eval_s_star: argument must be > 0");
    const double l = std::log(x);
    return kSixOverPiSq / (1.0 + l * l);
}

WeightFunction s_star() {
    WeightFunction w;
    w.fn = [](double x) { return eval_s_star(x); };
    return w;
}

double class_s_partial_sum(const WeightFunction& s, int K) {
    double sum = 0.0;
    for (int k = 0; k <= K; ++k) sum += s(std::exp2(0.5 * k));
    return sum;
}

double s_star_tail_bound(int K) {
    if (K < 1) throw std::domain_error("s_star_tail_bound: K must be >= 1");
    const double a = 2.0 / std::log(2.0);
    return kSixOverPiSq * a * a / K;
}

ClassSCertificate ensure_class_s(const WeightFunction& s, int K, double tail_bound) {
    if (K < 1) throw std::domain_error("ensure_class_s: K must be >= 1");
    if (!(tail_bound >= 0.0)) throw std::domain_error("ensure_class_s: tail bound must be >= 0");
    if (!std::isfinite(tail_bound) || tail_bound > 1.0)
        throw numeric_guard_error("ensure_class_s: tail bound exceeds 1, cannot certify");

    ClassSCertificate cert;
    cert.truncated_sum = class_s_partial_sum(s, K);
    cert.tail_bound = tail_bound;
    const double total = cert.truncated_sum + tail_bound;
    if (!std::isfinite(total))
        throw numeric_guard_error("ensure_class_s: class sum diverges, cannot certify");
    cert.factor = total <= 1.0 - kCertMargin ? 1.0 : (1.0 - kCertMargin) / total;

    const double c = cert.factor;
    auto base = s.fn;
    cert.weight.fn = [base, c](double x) { return c * base(x); };
    cert.weight.normalization_factor = c * s.normalization_factor;
    cert.weight.certified = true;
    return cert;
}

}  // namespace upfn
