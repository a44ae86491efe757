#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "upfn/common.hpp"

namespace upfn {

using Metric = std::function<double(int, int)>;

// delta -> entropy (log covering number).  Values are upper bounds on the true
// entropy, nonincreasing in delta, and 0 at or beyond the set diameter.
class EntropyProvider {
public:
    EntropyProvider() : fn_([](double) { return 0.0; }) {}

    static EntropyProvider zero();
    static EntropyProvider doubling_ball(double n_d, double radius);
    // Entropy of a k-fold log-scale hyperrectangle of ratio t >= 1.
    static EntropyProvider log_hyperrectangle(int k, double t);
    static EntropyProvider closed_form(std::function<double(double)> fn,
                                       double diameter = std::numeric_limits<double>::infinity());
    // Finite set backed by greedy covers evaluated on a fixed dyadic radius
    // grid; queries take the cheapest valid cover at a radius <= delta, which
    // keeps the provider deterministic and monotone.
    static EntropyProvider greedy_finite(const std::vector<int>& points, const Metric& dist);

    double operator()(double delta) const { return fn_(delta); }
    double diameter() const { return diameter_; }

private:
    std::function<double(double)> fn_;
    double diameter_ = 0.0;
};

// ln(N_d) ([log2(r/delta)]_+ + 1), the doubling-ball covering bound as written
// (not clamped to zero past the diameter).
double entropy_doubling_ball(double n_d, double r, double delta);

// k (ln(1+ln t) + [1 + ln(2/s)]_+),  t >= 1.
double entropy_log_hyperrectangle(int k, double t, double s);

}  // namespace upfn
