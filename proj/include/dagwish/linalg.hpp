#pragma once

#include <vector>

#include "dagwish/graph.hpp"
#include "dagwish/matrix.hpp"

namespace dagwish {

inline constexpr double kPivotFloor = 1e-12;

/// Modified Cholesky decomposition A = L diag(D)^{-1} L^T with L unit
/// lower-triangular and D > 0. This is the LDL^T factorization with D the
/// elementwise inverse of the LDL^T pivots. Right-looking, no pivoting;
/// throws NotPositiveDefinite when a pivot falls at or below pivot_floor.
CholeskyParam mcd(const SymMatrix& A, double pivot_floor = kPivotFloor);

SymMatrix spd_inverse(const SymMatrix& A, double pivot_floor = kPivotFloor);

/// log det A via the LDL^T pivots; throws NotPositiveDefinite for non-SPD A.
double logdet(const SymMatrix& A, double pivot_floor = kPivotFloor);

/// Parent-indexed pieces of a symmetric matrix at vertex i: the column
/// (A_ji)_{j in pa_i}, the pa_i x pa_i block, and the augmented block with
/// vertex i prepended. An empty parent set yields empty col/block and a 1x1
/// augmented block (A_ii).
struct ParentBlocks {
    std::vector<double> col;
    SymMatrix block;
    SymMatrix augmented;
};

ParentBlocks parent_blocks(const SymMatrix& A, const Dag& dag, int i);

/// L diag(D)^{-1} L^T for a general square L (the averaged factor is not
/// triangular), symmetrized exactly.
SymMatrix compose_precision(const Matrix& L, const std::vector<double>& D);

}  // namespace dagwish
