#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dagwish/errors.hpp"

namespace dagwish {

/// Dense row-major real matrix. Used for data matrices (rows = observations)
/// and for Cholesky-type factors, which stop being triangular after
/// permutation conjugation.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) throw DimensionMismatch("Matrix: negative dimension");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::fabs(v));
        return m;
    }

    const std::vector<double>& data() const { return a_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// Dense symmetric p x p matrix with full storage. Mutation goes through
/// set(), which writes both (i,j) and (j,i), so symmetry holds exactly.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int p, double fill = 0.0)
        : p_(p), a_(static_cast<std::size_t>(p) * p, fill) {
        if (p < 0) throw DimensionMismatch("SymMatrix: negative dimension");
    }

    static SymMatrix identity(int p) {
        SymMatrix m(p);
        for (int i = 0; i < p; ++i) m.set(i, i, 1.0);
        return m;
    }

    static SymMatrix diagonal(const std::vector<double>& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
        return m;
    }

    /// Adopts a square matrix, checking |A_ij - A_ji| <= tol and storing the
    /// symmetrized average.
    static SymMatrix from_matrix(const Matrix& m, double tol = 1e-9) {
        if (m.rows() != m.cols()) throw DimensionMismatch("SymMatrix: not square");
        SymMatrix s(m.rows());
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j <= i; ++j) {
                if (std::fabs(m(i, j) - m(j, i)) > tol)
                    throw ParseError("SymMatrix: asymmetric input beyond tolerance");
                s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
            }
        return s;
    }

    int dim() const { return p_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * p_ + j]; }

    void set(int i, int j, double v) {
        a_[static_cast<std::size_t>(i) * p_ + j] = v;
        a_[static_cast<std::size_t>(j) * p_ + i] = v;
    }

    void add(int i, int j, double v) { set(i, j, (*this)(i, j) + v); }

    bool operator==(const SymMatrix& o) const { return p_ == o.p_ && a_ == o.a_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::fabs(v));
        return m;
    }

    Matrix to_matrix() const {
        Matrix m(p_, p_);
        for (int i = 0; i < p_; ++i)
            for (int j = 0; j < p_; ++j) m(i, j) = (*this)(i, j);
        return m;
    }

private:
    int p_ = 0;
    std::vector<double> a_;
};

/// Modified Cholesky pair (L, D): L unit lower-triangular, D positive,
/// with A = L diag(D)^{-1} L^T.
struct CholeskyParam {
    Matrix L;
    std::vector<double> D;
};

}  // namespace dagwish
