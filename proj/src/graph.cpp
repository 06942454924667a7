#include "dagwish/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dagwish {

Dag::Dag(int p, std::vector<std::vector<int>> parents) : parents_(std::move(parents)) {
    if (static_cast<int>(parents_.size()) != p)
        throw DimensionMismatch("Dag: parent list count != p");
    for (int i = 0; i < p; ++i) {
        auto& pa = parents_[static_cast<std::size_t>(i)];
        std::sort(pa.begin(), pa.end());
        for (int j : pa)
            if (j <= i || j >= p)
                throw InvalidEdge("Dag: parent " + std::to_string(j + 1) + " of vertex " +
                                  std::to_string(i + 1) + " violates the parent ordering");
        if (std::adjacent_find(pa.begin(), pa.end()) != pa.end())
            throw InvalidEdge("Dag: duplicate parent");
    }
}

Dag Dag::full(int p) {
    Dag d(p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) d.parents_[static_cast<std::size_t>(i)].push_back(j);
    return d;
}

void Dag::check_vertex(int i) const {
    if (i < 0 || i >= dim())
        throw IndexOutOfRange("Dag: vertex " + std::to_string(i + 1) + " out of range");
}

std::vector<int> Dag::children(int i) const {
    check_vertex(i);
    std::vector<int> out;
    for (int j = 0; j < i; ++j)
        if (has_edge(i, j)) out.push_back(j);
    return out;
}

bool Dag::has_edge(int i, int j) const {
    const auto& pa = parents(j);
    return std::binary_search(pa.begin(), pa.end(), i);
}

Dag Dag::toggle_edge(int i, int j) const {
    check_vertex(j);
    if (i <= j || i >= dim())
        throw InvalidEdge("toggle_edge: need i > j in the parent ordering");
    Dag out = *this;
    auto& pa = out.parents_[static_cast<std::size_t>(j)];
    auto it = std::lower_bound(pa.begin(), pa.end(), i);
    if (it != pa.end() && *it == i)
        pa.erase(it);
    else
        pa.insert(it, i);
    return out;
}

int Dag::edge_count() const {
    int n = 0;
    for (const auto& pa : parents_) n += static_cast<int>(pa.size());
    return n;
}

bool Dag::sparser_than(const Dag& o) const {
    int a = edge_count(), b = o.edge_count();
    if (a != b) return a < b;
    return parents_ < o.parents_;
}

std::size_t Dag::hash() const {
    std::size_t h = static_cast<std::size_t>(dim());
    for (const auto& pa : parents_) {
        h = h * 1000003u + pa.size();
        for (int j : pa) h = h * 1000003u + static_cast<std::size_t>(j) + 1u;
    }
    return h;
}

Dag from_cholesky_support(const Matrix& L, double tau) {
    const int p = L.rows();
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j)
        for (int i = j + 1; i < p; ++i)
            if (std::fabs(L(i, j)) > tau) parents[static_cast<std::size_t>(j)].push_back(i);
    return Dag(p, std::move(parents));
}

}  // namespace dagwish
