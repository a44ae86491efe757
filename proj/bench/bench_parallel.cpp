// Timing comparison of the serial reference loop against the OpenMP path on
// the replication-heavy kernels: OU path suprema and smoothed white noise.

#include <chrono>
#include <cstdio>
#include <vector>

#include "upfn/mc.hpp"
#include "upfn/parallel.hpp"
#include "upfn/rng.hpp"

using namespace upfn;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void bench_ou(long R, int grid_n) {
    std::vector<double> t(static_cast<std::size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i) t[static_cast<std::size_t>(i)] = i / double(grid_n - 1);
    std::vector<double> out_serial(static_cast<std::size_t>(R)), out_par(out_serial);
    auto body = [&](std::vector<double>& out) {
        return [&out, &t](std::size_t i) {
            RngStream rng(42, 1, static_cast<std::uint64_t>(i));
            const auto path = simulate_ou(t, 1.0, 1.0, rng);
            double m = 0.0;
            for (double v : path) m = std::max(m, std::abs(v));
            out[i] = m;
        };
    };
    const double ts = time_ms([&] { run_indexed_serial(out_serial.size(), body(out_serial)); });
    const double tp = time_ms([&] { run_indexed(out_par.size(), body(out_par), 0); });
    bool equal = out_serial == out_par;
    std::printf("ou_supremum      R=%-7ld grid=%-4d serial %8.1f ms   omp %8.1f ms   speedup %5.2fx   identical=%s\n",
                R, grid_n, ts, tp, ts / tp, equal ? "yes" : "NO");
}

void bench_white_noise(long R, int grid_n) {
    std::vector<double> t(static_cast<std::size_t>(grid_n));
    for (int i = 0; i < grid_n; ++i)
        t[static_cast<std::size_t>(i)] = -0.5 + i / double(grid_n - 1);
    auto K = [](double u) { return u > -0.5 && u < 0.5 ? 0.5 - std::abs(u) : 0.0; };
    const double h = 1.0 / 64.0;
    std::vector<double> out_serial(static_cast<std::size_t>(R)), out_par(out_serial);
    auto body = [&](std::vector<double>& out) {
        return [&out, &t, &K, h](std::size_t i) {
            RngStream rng(42, 2, static_cast<std::uint64_t>(i));
            const auto field = simulate_white_noise_field(t, h, K, h / 16.0, -0.6, 0.6, rng);
            out[i] = lp_norm_grid(field, t, 2.0);
        };
    };
    const double ts = time_ms([&] { run_indexed_serial(out_serial.size(), body(out_serial)); });
    const double tp = time_ms([&] { run_indexed(out_par.size(), body(out_par), 0); });
    bool equal = out_serial == out_par;
    std::printf("white_noise_L2   R=%-7ld grid=%-4d serial %8.1f ms   omp %8.1f ms   speedup %5.2fx   identical=%s\n",
                R, grid_n, ts, tp, ts / tp, equal ? "yes" : "NO");
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", hardware_threads());
    bench_ou(20000, 64);
    bench_ou(20000, 256);
    bench_white_noise(2000, 256);
    bench_white_noise(2000, 512);
    return 0;
}
