#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagwish/graph.hpp"
#include "dagwish/matrix.hpp"
#include "dagwish/selection.hpp"

namespace dagwish {

/// sigma as a length-p array: position j holds sigma(j), 0-based. The
/// permuted data matrix has column j equal to column sigma(j) of the input.
using Permutation = std::vector<int>;

Permutation identity_permutation(int p);

Matrix apply_permutation(const Matrix& Y, const Permutation& sigma);

/// Conjugates factors back to the original variable order:
/// L_hat = P L_sigma P^T, D_hat = P D_sigma P^T. L_hat keeps a unit diagonal
/// but is generally not triangular.
std::pair<Matrix, std::vector<double>> unpermute_factors(const CholeskyParam& theta,
                                                         const Permutation& sigma);

struct Averaged {
    Matrix L_bar;
    std::vector<double> D_bar;
    SymMatrix omega_check;
};

/// Elementwise means of the back-permuted factors and the composed
/// precision L_bar diag(D_bar)^{-1} L_bar^T.
Averaged ensemble_average(const std::vector<std::pair<Matrix, std::vector<double>>>& factors);

struct ThresholdResult {
    double tau_b = 0.0;
    Matrix L_bar_tau;
    SymMatrix omega_check_tau;
};

/// Minimizes BIC(tau) = n tr(S Omega_tau) - n log|Omega_tau| + log n * E over
/// a uniform grid on [0, max offdiag |L_bar|], E counting all nonzeros of the
/// thresholded factor. Grid points with non-PD Omega_tau are skipped; ties go
/// to the larger (sparser) tau.
ThresholdResult bic_threshold_select(const Matrix& L_bar, const std::vector<double>& D_bar,
                                     const SymMatrix& S, int n, int grid_size);

enum class Variant { DagwBic, Dagw, Mle, Bayes };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct EnsembleEstimate {
    Matrix L_bar;
    std::vector<double> D_bar;
    SymMatrix omega_check;
    double tau_b = 0.0;
    Matrix L_bar_tau;
    SymMatrix omega_check_tau;
    std::vector<Dag> per_perm_dags;
    std::vector<Permutation> sigmas;
};

/// One permutation's pipeline output, already back-permuted. MAP and MLE
/// factors are both computed so method variants can share the (expensive)
/// DAG selection.
struct PermFactors {
    Permutation sigma;
    Dag dag;  // selected DAG in the permuted order
    std::pair<Matrix, std::vector<double>> map_factors;
    std::pair<Matrix, std::vector<double>> mle_factors;
};

/// One permutation end to end: select the DAG on the permuted data, take the
/// MAP and MLE factors, conjugate both back. The rng drives only the CV row
/// partition.
PermFactors run_permutation_pipeline(const Matrix& Y, Permutation sigma,
                                     const SelectionConfig& cfg, const PriorTemplate& prior,
                                     Rng rng);

/// Runs select-DAG + MAP + MLE for each of K random permutations.
/// workers = 1 is the serial reference path; workers > 1 runs the same
/// per-permutation pipelines under OpenMP with private rng streams
/// (seed xor k), so results are identical regardless of scheduling.
std::vector<PermFactors> run_perm_pipelines(const Matrix& Y, int K, const SelectionConfig& cfg,
                                            const PriorTemplate& prior, std::uint64_t seed,
                                            int workers);

/// The full permutation-ensemble estimator. DagwBic applies BIC
/// thresholding; Dagw returns the plain ensemble average (tau_b = 0); Mle
/// averages the DAG-constrained MLE factors instead of the MAP; Bayes forces
/// K = 1 with the identity permutation.
EnsembleEstimate estimate(const Matrix& Y, int K, const SelectionConfig& cfg,
                          const PriorTemplate& prior, Variant variant, std::uint64_t seed,
                          int grid_size = 50, int workers = 1);

}  // namespace dagwish
