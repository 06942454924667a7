#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dagwish/graph.hpp"
#include "dagwish/matrix.hpp"

namespace dagwish {

/// Matrix text format: first line "rows cols", then one whitespace-separated
/// row per line, 17 significant digits on write. Shared repo-wide.
Matrix load_matrix(std::istream& in);
Matrix load_matrix_file(const std::string& path);
void save_matrix(std::ostream& out, const Matrix& m);
void save_matrix_file(const std::string& path, const Matrix& m);

/// Symmetric load validates |A_ij - A_ji| <= 1e-9.
SymMatrix load_sym_matrix_file(const std::string& path);
void save_sym_matrix_file(const std::string& path, const SymMatrix& m);

/// DAG text format: line 1 "p", then per vertex "i: j1 j2 ..." (1-based).
Dag load_dag(std::istream& in);
Dag load_dag_file(const std::string& path);
void save_dag(std::ostream& out, const Dag& dag);
void save_dag_file(const std::string& path, const Dag& dag);

/// Number formatting used by every text artifact (full round-trip precision,
/// deterministic bytes).
std::string format_double(double v);

/// SVG heatmaps: cells colored by |value| on the shared scale
/// [0, max over all inputs], row 1 at the top. Deterministic bytes.
std::string heatmap_svg(const Matrix& m, double scale_max);

}  // namespace dagwish
