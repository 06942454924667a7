// Micro-benchmark comparing the serial reference path against the
// OpenMP-parallel path for the two parallel kernels (permutation pipelines
// and benchmark repetitions), and asserting the outputs match exactly.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dagwish/ensemble.hpp"
#include "dagwish/rng.hpp"
#include "dagwish/simbench.hpp"

using namespace dagwish;

namespace {

template <typename F>
double timed(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int p = argc > 1 ? std::atoi(argv[1]) : 20;
    const int n = argc > 2 ? std::atoi(argv[2]) : 100;
    const int K = argc > 3 ? std::atoi(argv[3]) : 32;
    int workers = 4;
#ifdef _OPENMP
    workers = omp_get_max_threads();
#endif

    Rng rng(1);
    ScenarioSpec spec;
    spec.scenario = Case::Banded;
    spec.p = p;
    spec.n = n;
    spec.reps = 8;
    spec.seed = 7;
    auto [omega0, dag0] = make_omega(spec, rng);
    Matrix Y = sample_gaussian(omega0, n, rng);

    SelectionConfig cfg;
    cfg.n_thresholds = 60;
    cfg.sss_iters = 3;
    cfg.cv_folds = 3;
    PriorTemplate prior;

    std::printf("p=%d n=%d K=%d workers=%d\n", p, n, K, workers);

    std::vector<PermFactors> serial_out, parallel_out;
    double t_serial = timed([&] { serial_out = run_perm_pipelines(Y, K, cfg, prior, 5, 1); });
    double t_par = timed([&] { parallel_out = run_perm_pipelines(Y, K, cfg, prior, 5, workers); });
    bool same = serial_out.size() == parallel_out.size();
    for (std::size_t k = 0; same && k < serial_out.size(); ++k)
        same = serial_out[k].dag == parallel_out[k].dag &&
               serial_out[k].map_factors == parallel_out[k].map_factors;
    std::printf("perm pipelines   serial %.3fs  parallel %.3fs  speedup %.2fx  identical=%s\n",
                t_serial, t_par, t_serial / t_par, same ? "yes" : "NO");

    std::vector<BenchRow> rows1, rowsN;
    double t_b1 = timed([&] {
        rows1 = run_benchmark(spec, {Variant::DagwBic, Variant::Mle}, cfg, 8, 50, 1);
    });
    double t_bN = timed([&] {
        rowsN = run_benchmark(spec, {Variant::DagwBic, Variant::Mle}, cfg, 8, 50, workers);
    });
    bool same_rows = rows1.size() == rowsN.size();
    for (std::size_t i = 0; same_rows && i < rows1.size(); ++i)
        same_rows = rows1[i].mean == rowsN[i].mean && rows1[i].se == rowsN[i].se;
    std::printf("benchmark reps   serial %.3fs  parallel %.3fs  speedup %.2fx  identical=%s\n",
                t_b1, t_bN, t_b1 / t_bN, same_rows ? "yes" : "NO");
    return same && same_rows ? 0 : 1;
}
