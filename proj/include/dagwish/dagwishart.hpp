#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "dagwish/graph.hpp"
#include "dagwish/linalg.hpp"
#include "dagwish/matrix.hpp"

namespace dagwish {

/// Scale matrix U and per-vertex shape vector alpha of a DAG-Wishart
/// distribution. The conjugate update maps (U, alpha) to (U + nS, alpha + n),
/// so prior and posterior share this type.
struct DagWishartParams {
    SymMatrix U;
    std::vector<double> alpha;
};

/// Log of the i-th vertex factor of the DAG-Wishart normalizing constant:
///   lgamma(a/2 - nu/2 - 1) + (a/2 - 1) log 2 + (nu/2) log pi
///   + (a/2 - nu/2 - 3/2) logdet(U^{>i}) - (a/2 - nu/2 - 1) logdet(U^{>=i}),
/// with the determinant of the empty block taken as 1.
/// Requires alpha_i - nu_i > 2 (propriety), else ImproperPrior.
double log_node_score(int i, const DagWishartParams& params, const Dag& dag);

/// Log normalizing constant; decomposes exactly as the sum of node scores.
double log_norm_const(const DagWishartParams& params, const Dag& dag);

/// Normalized log density of the DAG-Wishart at (L, D). Throws
/// SupportViolation when L carries a nonzero outside the DAG's support.
double log_prior_density(const CholeskyParam& theta, const DagWishartParams& params,
                         const Dag& dag);

/// Conjugate update: (U + nS, alpha + n). n >= 1.
DagWishartParams posterior_params(const DagWishartParams& params, const SymMatrix& S, int n);

/// Closed-form posterior mode over the Cholesky space. `post` holds the
/// updated pair (U + nS, alpha + n); the mode's denominator uses the PRIOR
/// shapes, passed separately as prior_alpha together with n.
/// For nu_i = 0 the row has no off-diagonal entries and
/// D_ii = U~_ii / (alpha_i + n).
CholeskyParam map_estimate(const DagWishartParams& post, const std::vector<double>& prior_alpha,
                           const Dag& dag, int n);

/// DAG-constrained maximum likelihood Cholesky factors from a sample
/// covariance: per-vertex regression coefficients and Schur-complement
/// residual variances of S + ridge I.
CholeskyParam mle_estimate(const SymMatrix& S, const Dag& dag, double ridge = 0.0);

/// Unnormalized log marginal DAG posterior:
/// log gamma_D(U + nS, alpha + n) - log gamma_D(U, alpha).
double log_dag_posterior(const Dag& dag, const DagWishartParams& prior, const SymMatrix& S,
                         int n);

/// Prior template used by DAG selection: U and alpha_i(D) = nu_i(D) + offset,
/// with offset > 2 for propriety.
struct PriorTemplate {
    double alpha_offset = 10.0;

    DagWishartParams build(const Dag& dag, const SymMatrix& U) const {
        DagWishartParams p{U, std::vector<double>(static_cast<std::size_t>(dag.dim()))};
        for (int i = 0; i < dag.dim(); ++i)
            p.alpha[static_cast<std::size_t>(i)] = dag.nu(i) + alpha_offset;
        return p;
    }
};

/// Marginal-posterior DAG scorer for one dataset (S, n) under a prior
/// template with U = I. The score decomposes over vertices, so single-edge
/// neighbors differ in exactly one node term; node terms are memoized by
/// (vertex, parent set) in a sharded concurrent map. Correctness does not
/// depend on cache hits.
class DagScorer {
public:
    DagScorer(const SymMatrix& S, int n, const PriorTemplate& prior);

    double node_score(int j, const std::vector<int>& parents) const;
    double score(const Dag& dag) const;

    int dim() const { return Upost_.dim(); }

private:
    struct NodeKey {
        int j;
        std::vector<int> parents;
        bool operator==(const NodeKey&) const = default;
    };
    struct NodeKeyHash {
        std::size_t operator()(const NodeKey& k) const {
            std::size_t h = static_cast<std::size_t>(k.j) + 1;
            for (int v : k.parents) h = h * 1000003u + static_cast<std::size_t>(v) + 1u;
            return h;
        }
    };

    double compute_node_score(int j, const std::vector<int>& parents) const;

    SymMatrix Upost_;  // I + nS
    int n_;
    double alpha_offset_;

    struct Shard {
        std::mutex mu;
        std::unordered_map<NodeKey, double, NodeKeyHash> map;
    };
    static constexpr int kShards = 16;
    mutable std::array<Shard, kShards> shards_;
};

}  // namespace dagwish
