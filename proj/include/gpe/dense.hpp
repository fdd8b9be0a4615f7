#pragma once

#include <cstddef>
#include <vector>

namespace gpe {

class SparseMatrix;

/// Row-major dense matrix, used for coarse direct solves and the small
/// generalized eigenproblems.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

    static DenseMatrix from_sparse(const SparseMatrix& s);
    static DenseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return a_[std::size_t(r) * cols_ + c]; }
    double operator()(int r, int c) const { return a_[std::size_t(r) * cols_ + c]; }
    const double* row(int r) const { return a_.data() + std::size_t(r) * cols_; }
    double* row(int r) { return a_.data() + std::size_t(r) * cols_; }

    std::vector<double> multiply(const std::vector<double>& x) const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// In-place lower Cholesky A = L L'. Returns false on a nonpositive pivot.
bool cholesky_factor(DenseMatrix& a);
void cholesky_solve(const DenseMatrix& l, std::vector<double>& x); // solves L L' x = b in place

/// Gaussian elimination with partial pivoting for small (possibly indefinite)
/// systems; returns false on a numerically singular matrix.
bool lu_solve(DenseMatrix a, std::vector<double>& x);

/// All eigenvalues (ascending) and eigenvectors (columns) of a symmetric
/// matrix by the cyclic Jacobi rotation method.
void jacobi_eigensolve(DenseMatrix a, std::vector<double>& eigenvalues, DenseMatrix& eigenvectors);

struct DenseEigResult {
    double lambda;
    std::vector<double> x; // B-normalized: x' B x = 1
};

/// Smallest eigenpair of the symmetric pencil (A, B), B positive definite.
/// Throws Error("indefinite-mass") when the Cholesky of B fails and
/// Error("mass-block-singular") when a pivot falls below pivot_floor.
DenseEigResult dense_generalized_smallest(const DenseMatrix& a, const DenseMatrix& b,
                                          double pivot_floor = 0.0);

} // namespace gpe
