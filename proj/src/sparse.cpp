#include "gpe/sparse.hpp"

#include "gpe/error.hpp"
#include "gpe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace gpe {

SparseMatrix::SparseMatrix(int n_rows, int n_cols, std::vector<std::int32_t> row_ptr,
                           std::vector<std::int32_t> col_idx, std::vector<double> vals)
    : n_rows_(n_rows), n_cols_(n_cols), row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)), vals_(std::move(vals)) {
    if (static_cast<int>(row_ptr_.size()) != n_rows_ + 1 || col_idx_.size() != vals_.size())
        throw Error("dimension-mismatch", "inconsistent CSR arrays");
}

SparseMatrix SparseMatrix::from_triplets(int n_rows, int n_cols, std::vector<Triplet> t) {
    // Stable sort by (row, col) keeps insertion order among duplicates, so the
    // floating-point accumulation order is reproducible.
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (t[a].row != t[b].row) return t[a].row < t[b].row;
        return t[a].col < t[b].col;
    });

    std::vector<std::int32_t> row_ptr(static_cast<std::size_t>(n_rows) + 1, 0);
    std::vector<std::int32_t> col_idx;
    std::vector<double> vals;
    col_idx.reserve(t.size());
    vals.reserve(t.size());

    for (std::size_t s = 0; s < order.size(); ++s) {
        const Triplet& e = t[order[s]];
        if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols)
            throw Error("dimension-mismatch", "triplet index out of range");
        if (s > 0) {
            const Triplet& prev = t[order[s - 1]];
            if (prev.row == e.row && prev.col == e.col) {
                vals.back() += e.value;
                continue;
            }
        }
        col_idx.push_back(e.col);
        vals.push_back(e.value);
        ++row_ptr[static_cast<std::size_t>(e.row) + 1];
    }
    for (int r = 0; r < n_rows; ++r) row_ptr[r + 1] += row_ptr[r];
    return SparseMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx), std::move(vals));
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<std::int32_t> rp(static_cast<std::size_t>(n) + 1);
    std::vector<std::int32_t> ci(static_cast<std::size_t>(n));
    std::vector<double> v(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i <= n; ++i) rp[i] = i;
    for (int i = 0; i < n; ++i) ci[i] = i;
    return SparseMatrix(n, n, std::move(rp), std::move(ci), std::move(v));
}

void SparseMatrix::multiply(const double* x, double* y) const {
    kernels::spmv_csr(static_cast<std::size_t>(n_rows_), row_ptr_.data(), col_idx_.data(),
                      vals_.data(), x, y);
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_cols_)
        throw Error("dimension-mismatch", "spmv size mismatch");
    std::vector<double> y(static_cast<std::size_t>(n_rows_));
    multiply(x.data(), y.data());
    return y;
}

double SparseMatrix::inner(const std::vector<double>& u, const std::vector<double>& v) const {
    std::vector<double> av = multiply(v);
    if (u.size() != av.size()) throw Error("dimension-mismatch", "inner size mismatch");
    return kernels::dot(u, av);
}

double SparseMatrix::coeff(int r, int c) const {
    for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
        if (col_idx_[p] == c) return vals_[p];
    return 0.0;
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<std::int32_t> rp(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (std::int32_t c : col_idx_) ++rp[static_cast<std::size_t>(c) + 1];
    for (int c = 0; c < n_cols_; ++c) rp[c + 1] += rp[c];
    std::vector<std::int32_t> ci(col_idx_.size());
    std::vector<double> v(vals_.size());
    std::vector<std::int32_t> fill(rp.begin(), rp.end() - 1);
    for (int r = 0; r < n_rows_; ++r) {
        for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
            const std::int32_t dst = fill[col_idx_[p]]++;
            ci[dst] = r;
            v[dst] = vals_[p];
        }
    }
    return SparseMatrix(n_cols_, n_rows_, std::move(rp), std::move(ci), std::move(v));
}

double SparseMatrix::symmetry_gap() const {
    SparseMatrix t = transpose();
    double gap = 0.0;
    for (int r = 0; r < n_rows_; ++r) {
        std::int32_t pa = row_ptr_[r], pb = t.row_ptr_[r];
        const std::int32_t ea = row_ptr_[r + 1], eb = t.row_ptr_[r + 1];
        while (pa < ea || pb < eb) {
            const std::int32_t ca = pa < ea ? col_idx_[pa] : n_cols_;
            const std::int32_t cb = pb < eb ? t.col_idx_[pb] : n_cols_;
            if (ca == cb) {
                gap = std::max(gap, std::abs(vals_[pa] - t.vals_[pb]));
                ++pa;
                ++pb;
            } else if (ca < cb) {
                gap = std::max(gap, std::abs(vals_[pa]));
                ++pa;
            } else {
                gap = std::max(gap, std::abs(t.vals_[pb]));
                ++pb;
            }
        }
    }
    return gap;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : vals_) m = std::max(m, std::abs(v));
    return m;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
    std::vector<std::vector<double>> d(static_cast<std::size_t>(n_rows_),
                                       std::vector<double>(static_cast<std::size_t>(n_cols_), 0.0));
    for (int r = 0; r < n_rows_; ++r)
        for (std::int32_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
            d[r][col_idx_[p]] += vals_[p];
    return d;
}

SparseMatrix add_scaled(const SparseMatrix& A, double a, const SparseMatrix& B, double b) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw Error("dimension-mismatch", "add_scaled shape mismatch");
    std::vector<std::int32_t> rp(static_cast<std::size_t>(A.rows()) + 1, 0);
    std::vector<std::int32_t> ci;
    std::vector<double> v;
    ci.reserve(A.nnz() + B.nnz());
    v.reserve(A.nnz() + B.nnz());
    for (int r = 0; r < A.rows(); ++r) {
        std::int32_t pa = A.row_ptr()[r], pb = B.row_ptr()[r];
        const std::int32_t ea = A.row_ptr()[r + 1], eb = B.row_ptr()[r + 1];
        while (pa < ea || pb < eb) {
            const std::int32_t ca = pa < ea ? A.col_idx()[pa] : A.cols();
            const std::int32_t cb = pb < eb ? B.col_idx()[pb] : A.cols();
            if (ca == cb) {
                ci.push_back(ca);
                v.push_back(a * A.values()[pa] + b * B.values()[pb]);
                ++pa;
                ++pb;
            } else if (ca < cb) {
                ci.push_back(ca);
                v.push_back(a * A.values()[pa]);
                ++pa;
            } else {
                ci.push_back(cb);
                v.push_back(b * B.values()[pb]);
                ++pb;
            }
            ++rp[r + 1];
        }
    }
    for (int r = 0; r < A.rows(); ++r) rp[r + 1] += rp[r];
    return SparseMatrix(A.rows(), A.cols(), std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix matmul(const SparseMatrix& A, const SparseMatrix& B) {
    if (A.cols() != B.rows()) throw Error("dimension-mismatch", "matmul shape mismatch");
    const int n = A.rows(), m = B.cols();
    std::vector<std::int32_t> rp(static_cast<std::size_t>(n) + 1, 0);
    std::vector<std::int32_t> ci;
    std::vector<double> v;
    std::vector<double> acc(static_cast<std::size_t>(m), 0.0);
    std::vector<std::int32_t> touched;
    touched.reserve(64);
    for (int r = 0; r < n; ++r) {
        touched.clear();
        for (std::int32_t pa = A.row_ptr()[r]; pa < A.row_ptr()[r + 1]; ++pa) {
            const std::int32_t k = A.col_idx()[pa];
            const double av = A.values()[pa];
            for (std::int32_t pb = B.row_ptr()[k]; pb < B.row_ptr()[k + 1]; ++pb) {
                const std::int32_t c = B.col_idx()[pb];
                if (acc[c] == 0.0 &&
                    std::find(touched.begin(), touched.end(), c) == touched.end())
                    touched.push_back(c);
                acc[c] += av * B.values()[pb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::int32_t c : touched) {
            ci.push_back(c);
            v.push_back(acc[c]);
            acc[c] = 0.0;
        }
        rp[r + 1] = rp[r] + static_cast<std::int32_t>(touched.size());
    }
    return SparseMatrix(n, m, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix galerkin_product(const SparseMatrix& P, const SparseMatrix& A) {
    return matmul(P.transpose(), matmul(A, P));
}

SparseMatrix bordered(const SparseMatrix& A, const std::vector<double>& b, double s) {
    if (A.rows() != A.cols() || static_cast<int>(b.size()) != A.rows())
        throw Error("dimension-mismatch", "bordered block sizes");
    const int n = A.rows();
    std::vector<SparseMatrix::Triplet> t;
    t.reserve(static_cast<std::size_t>(A.nnz()) + 2 * b.size() + 1);
    for (int r = 0; r < n; ++r)
        for (std::int32_t p = A.row_ptr()[r]; p < A.row_ptr()[r + 1]; ++p)
            t.push_back({r, A.col_idx()[p], A.values()[p]});
    for (int i = 0; i < n; ++i) {
        if (b[i] != 0.0) {
            t.push_back({i, n, b[i]});
            t.push_back({n, i, b[i]});
        }
    }
    t.push_back({n, n, s});
    return SparseMatrix::from_triplets(n + 1, n + 1, std::move(t));
}

} // namespace gpe
