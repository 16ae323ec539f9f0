// Timing comparison between the OpenMP kernels and their serial reference
// versions: neighborhood positive-region counting and feature extraction.
// Usage: bench_kernels [m] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "radclass/features.hpp"
#include "radclass/nrs.hpp"
#include "radclass/nrs_serial.hpp"
#include "radclass/rng.hpp"
#include "radclass/signal_io.hpp"

using namespace radclass;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

nrs::NeighborhoodDecisionSystem random_system(std::size_t m, int n, int k, std::uint64_t seed) {
    Rng rng(seed);
    nrs::NeighborhoodDecisionSystem sys;
    sys.universe.resize(static_cast<Eigen::Index>(m), n);
    sys.decisions.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (int a = 0; a < n; ++a)
            sys.universe(static_cast<Eigen::Index>(i), a) = rng.uniform(-1.0, 1.0);
        sys.decisions[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    }
    sys.delta = 0.25;
    return sys;
}

template <typename F>
double time_best_of(int repeats, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = now_seconds();
        fn();
        const double t1 = now_seconds();
        best = std::min(best, t1 - t0);
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t m = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1500;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%-34s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    {
        const auto sys = random_system(m, 8, 4, 1234);
        nrs::AttributeSubset all(8);
        std::iota(all.begin(), all.end(), 0);

        volatile std::size_t sink = 0;
        const double ts = time_best_of(repeats, [&] { sink += nrs::serial::positive_region_count(sys, all); });
        const double tp = time_best_of(repeats, [&] { sink += nrs::positive_region_count(sys, all); });
        std::printf("%-34s %12.4f %12.4f %8.2fx\n",
                    ("positive region, m=" + std::to_string(m)).c_str(), ts, tp, ts / tp);
    }

    {
        // feature extraction: the per-recording loop is the parallel axis, so
        // the serial reference is the same extractor forced to one thread
        const std::size_t n_rec = 64;
        std::vector<LabeledRecording> recs;
        for (std::size_t i = 0; i < n_rec; ++i)
            recs.push_back(signal_io::synthesize(signal_io::modulation_by_name("QPSK"), 4096, 20.0,
                                                 mix_seed(77, i)));
        const features::FeatureConfig cfg;
        const GroupingMap grouping;

#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
        omp_set_num_threads(1);
        const double ts = time_best_of(repeats, [&] { features::extract_all(recs, cfg, grouping); });
        omp_set_num_threads(max_threads);
#else
        const double ts = time_best_of(repeats, [&] { features::extract_all(recs, cfg, grouping); });
#endif
        const double tp = time_best_of(repeats, [&] { features::extract_all(recs, cfg, grouping); });
        std::printf("%-34s %12.4f %12.4f %8.2fx\n", "feature extraction, 64 x 4096", ts, tp,
                    ts / tp);
    }
    return 0;
}
