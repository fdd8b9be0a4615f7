#pragma once

#include <cstdint>
#include <vector>

namespace gpe {

/// Sparse matrix in row-compressed layout with int32 indices.
/// Column indices are sorted within each row; duplicate entries are merged
/// when building from triplets.
class SparseMatrix {
public:
    struct Triplet {
        std::int32_t row;
        std::int32_t col;
        double value;
    };

    SparseMatrix() = default;
    SparseMatrix(int n_rows, int n_cols, std::vector<std::int32_t> row_ptr,
                 std::vector<std::int32_t> col_idx, std::vector<double> vals);

    /// Accumulates triplets: duplicates are summed in insertion order, so the
    /// result is deterministic for a deterministic triplet sequence.
    static SparseMatrix from_triplets(int n_rows, int n_cols, std::vector<Triplet> triplets);

    static SparseMatrix identity(int n);

    int rows() const { return n_rows_; }
    int cols() const { return n_cols_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(vals_.size()); }

    const std::vector<std::int32_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::int32_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return vals_; }
    std::vector<double>& values() { return vals_; }

    /// y = A x  (kernel-dispatched SpMV)
    void multiply(const double* x, double* y) const;
    std::vector<double> multiply(const std::vector<double>& x) const;

    /// u' A v
    double inner(const std::vector<double>& u, const std::vector<double>& v) const;

    double coeff(int r, int c) const; // 0 if not stored

    SparseMatrix transpose() const;

    /// max_ij |A_ij - A_ji| (square matrices)
    double symmetry_gap() const;
    double max_abs() const;

    std::vector<std::vector<double>> to_dense() const;

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<std::int32_t> row_ptr_;
    std::vector<std::int32_t> col_idx_;
    std::vector<double> vals_;
};

/// a*A + b*B with pattern union.
SparseMatrix add_scaled(const SparseMatrix& A, double a, const SparseMatrix& B, double b);

/// A*B
SparseMatrix matmul(const SparseMatrix& A, const SparseMatrix& B);

/// P' A P (Galerkin product)
SparseMatrix galerkin_product(const SparseMatrix& P, const SparseMatrix& A);

/// Bordered (n+1)x(n+1) matrix [[A, b], [b', s]].
SparseMatrix bordered(const SparseMatrix& A, const std::vector<double>& b, double s);

} // namespace gpe
