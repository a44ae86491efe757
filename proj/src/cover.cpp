#include "upfn/cover.hpp"

#include <map>
#include <numeric>

namespace upfn {

GreedyCover covering_number_greedy(const std::vector<int>& points, const Metric& dist,
                                   double delta) {
    if (!(delta > 0.0)) throw std::domain_error("covering_number_greedy: delta must be > 0");
    GreedyCover cover;
    std::vector<char> covered(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (covered[i]) continue;
        const int c = points[i];
        cover.centers.push_back(c);
        for (std::size_t j = i; j < points.size(); ++j)
            if (!covered[j] && dist(c, points[j]) <= delta) covered[j] = 1;
    }
    cover.count = static_cast<int>(cover.centers.size());
    return cover;
}

GreedyCover covering_number_greedy(int n, const Metric& dist, double delta) {
    std::vector<int> pts(static_cast<std::size_t>(n));
    std::iota(pts.begin(), pts.end(), 0);
    return covering_number_greedy(pts, dist, delta);
}

DoubleNet build_double_net(int n, const Metric& dist1, const Metric& dist2,
                           const std::vector<std::pair<double, double>>& radius_pairs) {
    if (n <= 0) throw std::domain_error("build_double_net: empty point set");
    for (auto [d1, d2] : radius_pairs)
        if (!(d1 > 0.0) || !(d2 > 0.0))
            throw std::domain_error("build_double_net: radii must be > 0");

    DoubleNet net;
    net.cardinality_bound = 1.0;

    // Signature of a point: for every radius pair, the half-radius greedy
    // centers covering it in both metrics.  One representative per signature
    // gives a point within d1j (resp. d2j) of any member of its class, for all
    // j simultaneously, via the triangle inequality.
    std::vector<std::vector<int>> signatures(static_cast<std::size_t>(n));
    for (auto [d1, d2] : radius_pairs) {
        const GreedyCover c1 = covering_number_greedy(n, dist1, d1 / 2.0);
        const GreedyCover c2 = covering_number_greedy(n, dist2, d2 / 2.0);
        net.cardinality_bound *= static_cast<double>(c1.count) * c2.count;
        for (int p = 0; p < n; ++p) {
            int k1 = -1, k2 = -1;
            for (std::size_t k = 0; k < c1.centers.size() && k1 < 0; ++k)
                if (dist1(c1.centers[k], p) <= d1 / 2.0) k1 = static_cast<int>(k);
            for (std::size_t k = 0; k < c2.centers.size() && k2 < 0; ++k)
                if (dist2(c2.centers[k], p) <= d2 / 2.0) k2 = static_cast<int>(k);
            signatures[static_cast<std::size_t>(p)].push_back(k1);
            signatures[static_cast<std::size_t>(p)].push_back(k2);
        }
    }

    std::map<std::vector<int>, int> representative;
    for (int p = 0; p < n; ++p) {
        auto [it, inserted] = representative.try_emplace(signatures[static_cast<std::size_t>(p)], p);
        if (inserted) net.centers.push_back(p);
    }
    return net;
}

}  // namespace upfn
