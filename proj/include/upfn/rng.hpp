#pragma once

#include <cmath>
#include <cstdint>

namespace upfn {

// Counter-based stream: output i is mix(key + i*GAMMA) (splitmix64).  A stream
// is fully determined by (seed, experiment, replication), so sample paths do
// not depend on scheduling or thread count.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t experiment, std::uint64_t replication) {
        key_ = mix(seed ^ 0x9e3779b97f4a7c15ull);
        key_ = mix(key_ ^ mix(experiment + 0xbf58476d1ce4e5b9ull));
        key_ = mix(key_ ^ mix(replication + 0x94d049bb133111ebull));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++ctr_) * 0x9e3779b97f4a7c15ull;
        return mix(z);
    }

    // Uniform on (0,1); never returns 0 or 1.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller; second variate cached within the stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace upfn
