#include "dagwish/linalg.hpp"

#include <cmath>
#include <string>

namespace dagwish {

namespace {

// In-place LDL^T pivots and strict lower factor. A = L diag(piv) L^T.
void ldlt(const SymMatrix& A, double pivot_floor, Matrix& L, std::vector<double>& piv) {
    const int p = A.dim();
    L = Matrix::identity(p);
    piv.assign(static_cast<std::size_t>(p), 0.0);
    for (int j = 0; j < p; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k) * piv[static_cast<std::size_t>(k)];
        if (!(d > pivot_floor))
            throw NotPositiveDefinite("ldlt: pivot " + std::to_string(d) + " at column " +
                                      std::to_string(j + 1));
        piv[static_cast<std::size_t>(j)] = d;
        for (int i = j + 1; i < p; ++i) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k)
                s -= L(i, k) * L(j, k) * piv[static_cast<std::size_t>(k)];
            L(i, j) = s / d;
        }
    }
}

}  // namespace

CholeskyParam mcd(const SymMatrix& A, double pivot_floor) {
    Matrix L;
    std::vector<double> piv;
    ldlt(A, pivot_floor, L, piv);
    for (double& d : piv) d = 1.0 / d;
    return CholeskyParam{std::move(L), std::move(piv)};
}

SymMatrix spd_inverse(const SymMatrix& A, double pivot_floor) {
    const int p = A.dim();
    Matrix L;
    std::vector<double> piv;
    ldlt(A, pivot_floor, L, piv);
    // Solve L diag(piv) L^T X = I column by column.
    SymMatrix inv(p);
    std::vector<double> x(static_cast<std::size_t>(p));
    for (int c = 0; c < p; ++c) {
        for (int i = 0; i < p; ++i) x[static_cast<std::size_t>(i)] = (i == c) ? 1.0 : 0.0;
        for (int i = 0; i < p; ++i)
            for (int k = 0; k < i; ++k)
                x[static_cast<std::size_t>(i)] -= L(i, k) * x[static_cast<std::size_t>(k)];
        for (int i = 0; i < p; ++i) x[static_cast<std::size_t>(i)] /= piv[static_cast<std::size_t>(i)];
        for (int i = p - 1; i >= 0; --i)
            for (int k = i + 1; k < p; ++k)
                x[static_cast<std::size_t>(i)] -= L(k, i) * x[static_cast<std::size_t>(k)];
        for (int i = c; i < p; ++i) inv.set(i, c, x[static_cast<std::size_t>(i)]);
    }
    return inv;
}

double logdet(const SymMatrix& A, double pivot_floor) {
    Matrix L;
    std::vector<double> piv;
    ldlt(A, pivot_floor, L, piv);
    double s = 0.0;
    for (double d : piv) s += std::log(d);
    return s;
}

ParentBlocks parent_blocks(const SymMatrix& A, const Dag& dag, int i) {
    if (i < 0 || i >= A.dim() || dag.dim() != A.dim())
        throw IndexOutOfRange("parent_blocks: vertex " + std::to_string(i + 1));
    const std::vector<int>& pa = dag.parents(i);
    const int nu = static_cast<int>(pa.size());
    ParentBlocks out{std::vector<double>(static_cast<std::size_t>(nu)), SymMatrix(nu),
                     SymMatrix(nu + 1)};
    out.augmented.set(0, 0, A(i, i));
    for (int a = 0; a < nu; ++a) {
        out.col[static_cast<std::size_t>(a)] = A(pa[static_cast<std::size_t>(a)], i);
        out.augmented.set(0, a + 1, out.col[static_cast<std::size_t>(a)]);
        for (int b = 0; b <= a; ++b) {
            double v = A(pa[static_cast<std::size_t>(a)], pa[static_cast<std::size_t>(b)]);
            out.block.set(a, b, v);
            out.augmented.set(a + 1, b + 1, v);
        }
    }
    return out;
}

SymMatrix compose_precision(const Matrix& L, const std::vector<double>& D) {
    const int p = L.rows();
    if (L.cols() != p || static_cast<int>(D.size()) != p)
        throw DimensionMismatch("compose_precision: shape mismatch");
    SymMatrix out(p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k)
                s += L(i, k) * L(j, k) / D[static_cast<std::size_t>(k)];
            out.set(i, j, s);
        }
    return out;
}

}  // namespace dagwish
