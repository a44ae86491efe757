#pragma once

#include <functional>

#include "upfn/common.hpp"

namespace upfn {

// A positive weight s used to spread chaining error across scales.  Membership
// in the admissible class requires sum_{k>=0} s(2^{k/2}) <= 1; `certified`
// records that the (rescaled) function passed that check.
struct WeightFunction {
    std::function<double(double)> fn;  // x > 0 -> s(x) > 0
    double normalization_factor = 1.0;
    bool certified = false;

    double operator()(double x) const {
        if (!(x > 0.0)) throw std::domain_error("WeightFunction: argument must be > 0");
        return fn(x);
    }
};

// s*(x) = (6/pi^2) (1 + ln^2 x)^{-1}.
double eval_s_star(double x);

WeightFunction s_star();

// Truncated class sum sum_{k=0..K} s(2^{k/2}).
double class_s_partial_sum(const WeightFunction& s, int K);

// Analytic tail majorant of sum_{k>K} s(2^{k/2}) for the s*-shaped decay
// s(x) <= C/(1+ln^2 x): tail <= C (2/ln 2)^2 / K.
double s_star_tail_bound(int K);

struct ClassSCertificate {
    WeightFunction weight;      // c * s, certified
    double truncated_sum = 0;   // raw sum_{k<=K} s(2^{k/2})
    double tail_bound = 0;      // caller- or kind-supplied majorant of the tail
    double factor = 1;          // c
};

// Rescales s by c <= 1 so that c*(truncated sum + tail) <= 1 - 1e-9 and marks
// the result certified.  Throws if the tail bound alone already exceeds 1.
ClassSCertificate ensure_class_s(const WeightFunction& s, int K, double tail_bound);

}  // namespace upfn
