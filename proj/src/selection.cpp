#include "dagwish/selection.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dagwish/linalg.hpp"

namespace dagwish {

SymMatrix sample_covariance(const Matrix& Y) {
    const int n = Y.rows(), p = Y.cols();
    if (n < 1) throw DimensionMismatch("sample_covariance: no observations");
    SymMatrix S(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += Y(r, i) * Y(r, j);
            S.set(i, j, s / n);
        }
    return S;
}

namespace {

void push_unique(std::vector<Dag>& out, std::unordered_set<Dag, DagHash>& seen, const Dag& d) {
    if (seen.insert(d).second) out.push_back(d);
}

}  // namespace

std::vector<Dag> candidate_graphs(const SymMatrix& S, const SelectionConfig& cfg) {
    if (cfg.n_thresholds < 1) throw InvalidSpec("candidate_graphs: n_thresholds must be >= 1");
    SymMatrix A = S;
    for (int i = 0; i < A.dim(); ++i) A.set(i, i, A(i, i) + cfg.ridge);
    const CholeskyParam theta = mcd(spd_inverse(A));

    std::vector<double> offdiag;
    for (int j = 0; j < theta.L.rows(); ++j)
        for (int i = j + 1; i < theta.L.rows(); ++i)
            if (theta.L(i, j) != 0.0) offdiag.push_back(std::fabs(theta.L(i, j)));
    std::sort(offdiag.begin(), offdiag.end());

    std::vector<Dag> out;
    std::unordered_set<Dag, DagHash> seen;
    // Forced endpoints: the full tau = 0 support and the empty DAG.
    push_unique(out, seen, from_cholesky_support(theta.L, 0.0));
    push_unique(out, seen, Dag::empty(S.dim()));
    // Thresholds at off-diagonal |L| quantiles, uniform in rank. Strict
    // comparison makes the graph at quantile value v drop v itself, so
    // consecutive quantiles give distinct graphs when the values differ.
    const int m = static_cast<int>(offdiag.size());
    for (int k = 0; k < cfg.n_thresholds && m > 0; ++k) {
        int idx = (cfg.n_thresholds == 1)
                      ? m - 1
                      : static_cast<int>((static_cast<long long>(k) * (m - 1)) /
                                         (cfg.n_thresholds - 1));
        push_unique(out, seen, from_cholesky_support(theta.L, offdiag[static_cast<std::size_t>(idx)]));
    }
    return out;
}

std::vector<Dag> sss_expand(const std::vector<Dag>& seeds, const DagScorer& scorer,
                            const SelectionConfig& cfg) {
    std::vector<Dag> dedup;
    std::unordered_set<Dag, DagHash> seen;
    for (const Dag& s : seeds) push_unique(dedup, seen, s);
    if (cfg.sss_iters == 0 || dedup.empty()) return dedup;

    const int p = scorer.dim();
    std::vector<std::pair<double, Dag>> pool;
    std::unordered_set<Dag, DagHash> in_pool;
    auto visit = [&](double sc, const Dag& d) {
        if (in_pool.insert(d).second) pool.emplace_back(sc, d);
    };

    double best_seed_score = 0.0;
    const Dag* best_seed = nullptr;

    for (const Dag& seed : dedup) {
        Dag cur = seed;
        std::vector<double> node(static_cast<std::size_t>(p));
        double total = 0.0;
        for (int j = 0; j < p; ++j) {
            node[static_cast<std::size_t>(j)] = scorer.node_score(j, cur.parents(j));
            total += node[static_cast<std::size_t>(j)];
        }
        if (best_seed == nullptr || total > best_seed_score) {
            best_seed_score = total;
            best_seed = &seed;
        }
        visit(total, cur);

        for (int iter = 0; iter < cfg.sss_iters; ++iter) {
            // Greedy best-improving single-edge toggle.
            double best_delta = 0.0;
            int best_i = -1, best_j = -1;
            double best_node = 0.0;
            for (int j = 0; j < p; ++j) {
                std::vector<int> pa = cur.parents(j);
                for (int i = j + 1; i < p; ++i) {
                    auto it = std::lower_bound(pa.begin(), pa.end(), i);
                    bool present = (it != pa.end() && *it == i);
                    if (present)
                        pa.erase(it);
                    else
                        pa.insert(it, i);
                    double ns = scorer.node_score(j, pa);
                    double delta = ns - node[static_cast<std::size_t>(j)];
                    if (delta > best_delta) {
                        best_delta = delta;
                        best_i = i;
                        best_j = j;
                        best_node = ns;
                    }
                    // Undo for the next candidate edge of this vertex.
                    auto undo = std::lower_bound(pa.begin(), pa.end(), i);
                    if (present)
                        pa.insert(undo, i);
                    else
                        pa.erase(undo);
                }
            }
            if (best_j < 0) break;
            cur = cur.toggle_edge(best_i, best_j);
            node[static_cast<std::size_t>(best_j)] = best_node;
            total += best_delta;
            visit(total, cur);
        }
    }

    std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second.sparser_than(b.second);
    });
    if (static_cast<int>(pool.size()) > cfg.sss_pool) pool.resize(static_cast<std::size_t>(cfg.sss_pool));

    std::vector<Dag> out;
    out.reserve(pool.size() + 1);
    bool have_best_seed = false;
    for (auto& [sc, d] : pool) {
        if (d == *best_seed) have_best_seed = true;
        out.push_back(std::move(d));
    }
    if (!have_best_seed) out.push_back(*best_seed);
    return out;
}

std::vector<Matrix> cv_partitions(const Matrix& Y, int folds, Rng& rng) {
    const int n = Y.rows();
    if (folds < 2 || folds > n)
        throw InvalidFolds("cv_partitions: need 2 <= folds <= n, got folds=" +
                           std::to_string(folds) + ", n=" + std::to_string(n));
    std::vector<int> order = rng.permutation(n);
    // First n % folds subsets take the extra row.
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(folds));
    int start = 0;
    for (int f = 0; f < folds; ++f) {
        int size = n / folds + (f < n % folds ? 1 : 0);
        std::vector<bool> held(static_cast<std::size_t>(n), false);
        for (int k = start; k < start + size; ++k) held[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;
        start += size;
        Matrix train(n - size, Y.cols());
        int r = 0;
        for (int row = 0; row < n; ++row) {
            if (held[static_cast<std::size_t>(row)]) continue;
            for (int c = 0; c < Y.cols(); ++c) train(r, c) = Y(row, c);
            ++r;
        }
        out.push_back(std::move(train));
    }
    return out;
}

Dag select_dag(const Matrix& Y, const PriorTemplate& prior, const SelectionConfig& cfg,
               Rng& rng) {
    const int n = Y.rows(), p = Y.cols();
    if (p < 1) throw DimensionMismatch("select_dag: need p >= 1");
    if (n < cfg.cv_folds) throw InvalidFolds("select_dag: n < cv_folds");

    std::vector<Matrix> datasets;
    datasets.push_back(Y);
    for (Matrix& m : cv_partitions(Y, cfg.cv_folds, rng)) datasets.push_back(std::move(m));

    std::vector<Dag> candidates;
    std::unordered_set<Dag, DagHash> seen;
    for (const Matrix& data : datasets) {
        const SymMatrix S = sample_covariance(data);
        DagScorer scorer(S, data.rows(), prior);
        for (const Dag& d : sss_expand(candidate_graphs(S, cfg), scorer, cfg))
            push_unique(candidates, seen, d);
    }

    // All final scoring on the full data.
    DagScorer full_scorer(sample_covariance(Y), n, prior);
    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        scores[i] = full_scorer.score(candidates[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (scores[i] > scores[best] ||
            (scores[i] == scores[best] && candidates[i].sparser_than(candidates[best])))
            best = i;
    }
    return candidates[best];
}

}  // namespace dagwish
