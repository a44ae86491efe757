#pragma once

#include <utility>
#include <vector>

#include "upfn/entropy.hpp"

namespace upfn {

struct GreedyCover {
    std::vector<int> centers;
    int count = 0;
};

// Greedy cover of the index set {0..n-1}: the first point not covered by the
// centers chosen so far becomes the next center (input order; deterministic).
GreedyCover covering_number_greedy(int n, const Metric& dist, double delta);

// Same over an explicit subset of indices.
GreedyCover covering_number_greedy(const std::vector<int>& points, const Metric& dist,
                                   double delta);

struct DoubleNet {
    std::vector<int> centers;
    double cardinality_bound = 0.0;  // prod_j N1(d1j/2) N2(d2j/2)
};

// Net simultaneously fine in two semi-metrics: every point has a net element
// within min_j d1j in dist1 and min_j d2j in dist2.
DoubleNet build_double_net(int n, const Metric& dist1, const Metric& dist2,
                           const std::vector<std::pair<double, double>>& radius_pairs);

}  // namespace upfn
