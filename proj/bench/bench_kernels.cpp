// Throughput comparison of the ensemble kernels: OpenMP parallel vs the
// serial reference, and the factorized batch sampler vs the literal
// draw-by-draw reference and the direct protocol simulation.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "pushsim/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace pushsim;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void bench_ensemble(std::uint64_t n, std::uint64_t trials) {
    EnsembleParams p;
    p.n = n;
    p.trials = trials;
    p.master_seed = 1;

    std::printf("n = %llu, trials = %llu\n", (unsigned long long)n,
                (unsigned long long)trials);
    for (Sampler s : {Sampler::Direct, Sampler::Batch, Sampler::BatchReference}) {
        p.sampler = s;
        auto t0 = Clock::now();
        const auto serial = run_ensemble_serial(p);
        const double ts = seconds_since(t0);

        t0 = Clock::now();
        const auto parallel = run_ensemble(p);
        const double tp = seconds_since(t0);

        const bool identical = serial.dist.counts == parallel.dist.counts;
        std::printf("  %-16s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  "
                    "runs/s %9.0f  identical %s\n",
                    sampler_name(s), ts, tp, ts / tp, trials / tp,
                    identical ? "yes" : "NO");
        if (!identical) std::exit(1);
    }
}

} // namespace

int main(int argc, char** argv) {
    std::uint64_t scale = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: disabled\n");
#endif
    bench_ensemble(1000, 20000 * scale);
    bench_ensemble(100000, 500 * scale);
    bench_ensemble(1 << 20, 50 * scale);
    return 0;
}
