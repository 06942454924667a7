#pragma once

#include <cstdint>
#include <vector>

#include "dagwish/dagwishart.hpp"
#include "dagwish/graph.hpp"
#include "dagwish/matrix.hpp"
#include "dagwish/rng.hpp"

namespace dagwish {

/// Knobs for the candidate-generation / search / cross-validation pipeline.
/// Defaults follow the reference settings; desk-scale runs shrink
/// n_thresholds and sss_iters.
struct SelectionConfig {
    double ridge = 0.1;
    int n_thresholds = 3000;
    int sss_iters = 50;
    int sss_pool = 200;
    int cv_folds = 10;
    std::uint64_t seed = 0;
};

/// Candidate DAGs from hard-thresholding the modified Cholesky factor of
/// (S + ridge I)^{-1}. Thresholds are the empirical quantiles of the nonzero
/// off-diagonal |L_ij|, uniformly spaced in quantile rank; the empty DAG and
/// the tau = 0 support are always included. De-duplicated, deterministic
/// order.
std::vector<Dag> candidate_graphs(const SymMatrix& S, const SelectionConfig& cfg);

/// Shotgun stochastic search: greedy hill-climb from every seed over
/// single-edge-toggle neighborhoods, at most sss_iters moves per seed. All
/// visited DAGs enter a pool truncated to the sss_pool best; the best seed is
/// always retained. sss_iters = 0 returns the de-duplicated seeds.
std::vector<Dag> sss_expand(const std::vector<Dag>& seeds, const DagScorer& scorer,
                            const SelectionConfig& cfg);

/// Leave-one-subset-out training sets: `folds` matrices, each omitting one of
/// `folds` near-equal random subsets of the rows.
std::vector<Matrix> cv_partitions(const Matrix& Y, int folds, Rng& rng);

/// Full DAG selection: candidates from the full data and every CV training
/// set (thresholding + search on each), all scored on the FULL data; returns
/// the argmax, ties broken toward fewer edges then lexicographic parents.
Dag select_dag(const Matrix& Y, const PriorTemplate& prior, const SelectionConfig& cfg,
               Rng& rng);

/// Sample covariance S = (1/n) Y^T Y (observations in rows, zero mean).
SymMatrix sample_covariance(const Matrix& Y);

}  // namespace dagwish
