#pragma once

#include <cstdint>
#include <vector>

#include "dagwish/matrix.hpp"

namespace dagwish {

/// DAG under the parent ordering: every edge points from a larger vertex to a
/// smaller one, so parents[i] is a sorted subset of {i+1, ..., p-1}
/// (0-based). Acyclicity is structural. Values are immutable after
/// construction; edge mutation returns a copy.
class Dag {
public:
    Dag() = default;
    explicit Dag(int p) : parents_(static_cast<std::size_t>(p)) {}
    Dag(int p, std::vector<std::vector<int>> parents);

    static Dag empty(int p) { return Dag(p); }
    static Dag full(int p);

    int dim() const { return static_cast<int>(parents_.size()); }

    const std::vector<int>& parents(int i) const {
        check_vertex(i);
        return parents_[static_cast<std::size_t>(i)];
    }

    int nu(int i) const { return static_cast<int>(parents(i).size()); }

    std::vector<int> children(int i) const;

    bool has_edge(int i, int j) const;  // edge i -> j, requires i > j

    /// Adds edge i -> j if absent, removes it if present. i > j required.
    Dag toggle_edge(int i, int j) const;

    int edge_count() const;

    bool operator==(const Dag& o) const { return parents_ == o.parents_; }
    bool operator!=(const Dag& o) const { return !(*this == o); }

    /// Lexicographic order on (edge count, parent lists); the deterministic
    /// tie-break used by DAG selection.
    bool sparser_than(const Dag& o) const;

    std::size_t hash() const;

private:
    void check_vertex(int i) const;
    std::vector<std::vector<int>> parents_;
};

struct DagHash {
    std::size_t operator()(const Dag& d) const { return d.hash(); }
};

/// Support of a unit lower-triangular factor above a hard threshold:
/// parents[j] = { i > j : |L_ij| > tau }. Strict comparison.
Dag from_cholesky_support(const Matrix& L, double tau);

}  // namespace dagwish
