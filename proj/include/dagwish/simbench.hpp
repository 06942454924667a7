#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagwish/ensemble.hpp"
#include "dagwish/graph.hpp"
#include "dagwish/matrix.hpp"
#include "dagwish/rng.hpp"

namespace dagwish {

enum class Case { Banded, AR, Sparse3pct, Compound, PermutedCompound };

std::string case_name(Case c);
Case case_from_name(const std::string& name);

struct ScenarioSpec {
    Case scenario = Case::Banded;
    int p = 30;
    int n = 100;
    int reps = 20;
    std::uint64_t seed = 0;
};

/// True precision matrix and its DAG (the support of its exact modified
/// Cholesky factor). Banded/AR/Compound are deterministic in p; Sparse3pct
/// and PermutedCompound consume the rng and re-randomize per repetition.
std::pair<SymMatrix, Dag> make_omega(const ScenarioSpec& spec, Rng& rng);

/// n i.i.d. rows from N(0, Omega0^{-1}), generated as Z R^T with R a
/// Cholesky square root of the covariance.
Matrix sample_gaussian(const SymMatrix& Omega0, int n, Rng& rng);

struct LossReport {
    double l1 = 0, l2 = 0, l3 = 0, l4 = 0, l5 = 0;

    double by_index(int k) const;
};

/// Stein's loss plus absolute/squared error sums, restricted to the true
/// support (L2/L3) and over all entries (L4/L5). Plain sums, not averages.
LossReport losses(const SymMatrix& est, const SymMatrix& Omega0, const Dag& dag0);

struct BenchRow {
    std::string scenario;
    int p = 0;
    int n = 0;
    std::string method;
    std::string loss;
    double mean = 0;
    double se = 0;  // NaN when reps == 1
    int reps = 0;
    std::uint64_t seed = 0;
};

/// Per-repetition estimates for every requested variant in one pass; the
/// expensive per-permutation DAG selection is shared between DagwBic, Dagw
/// and Mle. Also returned for the rate/equivariance experiments.
struct RepEstimates {
    SymMatrix omega0;
    Dag dag0;
    std::vector<std::pair<Variant, SymMatrix>> estimates;
};

RepEstimates run_rep(const ScenarioSpec& spec, const std::vector<Variant>& methods,
                     const SelectionConfig& cfg, int K, int grid_size, int rep_index,
                     int workers);

/// Runs `spec.reps` repetitions (fresh truth for the randomized cases, fresh
/// data always) and reports mean and standard error of each loss per method.
/// Repetitions use private rng streams (seed xor rep); workers > 1
/// parallelizes repetitions with results identical to serial order.
std::vector<BenchRow> run_benchmark(const ScenarioSpec& spec, const std::vector<Variant>& methods,
                                    const SelectionConfig& cfg, int K, int grid_size,
                                    int workers);

/// Renders benchmark rows as CSV (header `case,p,n,method,loss,mean,se,reps,seed`)
/// preceded by `#`-comment lines echoing the configuration. Byte-deterministic.
std::string benchmark_csv(const std::vector<BenchRow>& rows, const std::string& config_echo);

}  // namespace dagwish
