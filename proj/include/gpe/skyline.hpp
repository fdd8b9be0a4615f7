#pragma once

#include "gpe/sparse.hpp"

#include <cstdint>
#include <vector>

namespace gpe {

/// Reverse Cuthill-McKee ordering of a symmetric sparsity pattern.
std::vector<std::int32_t> rcm_ordering(const SparseMatrix& pattern);

/// Envelope (skyline) Cholesky factorization with RCM pre-ordering.
/// The symbolic phase depends only on the pattern, so repeated numeric
/// factorizations with updated values (as in a self-consistent loop or a
/// shifted pencil A - sigma*B) reuse the envelope.
class SkylineCholesky {
public:
    explicit SkylineCholesky(const SparseMatrix& pattern);

    /// Factorizes A - sigma*B (B optional). Returns false on a nonpositive
    /// pivot, i.e. when the shifted matrix is not positive definite.
    bool factorize(const SparseMatrix& a, const SparseMatrix* b = nullptr, double sigma = 0.0);

    /// Solves L L' x = rhs. factorize() must have succeeded.
    std::vector<double> solve(const std::vector<double>& rhs) const;

    int size() const { return n_; }
    std::int64_t envelope_size() const { return static_cast<std::int64_t>(vals_.size()); }

private:
    int n_ = 0;
    std::vector<std::int32_t> perm_;  // perm_[new] = old
    std::vector<std::int32_t> iperm_; // iperm_[old] = new
    std::vector<std::int32_t> first_; // leftmost column of each permuted row's envelope
    std::vector<std::int64_t> row_begin_;
    std::vector<double> vals_; // lower-triangle envelope rows, diagonal last in each row
    bool factored_ = false;
};

} // namespace gpe
