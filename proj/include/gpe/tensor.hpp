#pragma once

#include "gpe/sparse.hpp"

#include <cstdint>
#include <vector>

namespace gpe {

/// Symmetric sparse third-order tensor. Entries are stored once per index
/// multiset in canonical order i <= j <= k; contraction semantics expand every
/// distinct permutation. After construction a flat contraction plan maps the
/// tensor onto a fixed matrix sparsity pattern, so contracting against a
/// vector is a single CSR-style pass (kernel-dispatched) whose cost is
/// proportional to the stored entry count.
class SparseTensor3 {
public:
    struct Entry {
        std::int32_t i, j, k;
        double v;
    };

    SparseTensor3() = default;

    /// Canonicalizes (sorts each index triple), merges duplicates, builds the
    /// contraction plan.
    static SparseTensor3 from_entries(int dim, std::vector<Entry> raw);

    int dim() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::int64_t stored_entries() const { return static_cast<std::int64_t>(entries_.size()); }

    /// M[a,b] = sum_c T_sym[a,b,c] u[c]; symmetric result on a fixed pattern.
    SparseMatrix contract_mode3(const std::vector<double>& u) const;
    void contract_mode3_into(const std::vector<double>& u, SparseMatrix& out) const;

    /// Zero-valued matrix carrying the contraction's output pattern.
    const SparseMatrix& pattern() const { return pattern_; }

private:
    int dim_ = 0;
    std::vector<Entry> entries_;
    SparseMatrix pattern_;
    // plan: per output nonzero, a contiguous (column, coefficient) run
    std::vector<std::int32_t> plan_ptr_;
    std::vector<std::int32_t> plan_col_;
    std::vector<double> plan_val_;
};

} // namespace gpe
