#include "gpe/tensor.hpp"

#include "gpe/error.hpp"
#include "gpe/kernels.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace gpe {

SparseTensor3 SparseTensor3::from_entries(int dim, std::vector<Entry> raw) {
    SparseTensor3 t;
    t.dim_ = dim;

    for (Entry& e : raw) {
        std::array<std::int32_t, 3> idx{e.i, e.j, e.k};
        std::sort(idx.begin(), idx.end());
        if (idx[0] < 0 || idx[2] >= dim)
            throw Error("dimension-mismatch", "tensor index out of range");
        e.i = idx[0];
        e.j = idx[1];
        e.k = idx[2];
    }
    std::sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    });
    for (const Entry& e : raw) {
        if (!t.entries_.empty() && t.entries_.back().i == e.i && t.entries_.back().j == e.j &&
            t.entries_.back().k == e.k)
            t.entries_.back().v += e.v;
        else
            t.entries_.push_back(e);
    }
    std::erase_if(t.entries_, [](const Entry& e) { return e.v == 0.0; });

    // expand permutations into (row, col, contraction column, coefficient)
    struct Item {
        std::int32_t a, b, c;
        double v;
    };
    std::vector<Item> items;
    items.reserve(t.entries_.size() * 6);
    for (const Entry& e : t.entries_) {
        std::array<std::array<std::int32_t, 3>, 6> perms = {{{e.i, e.j, e.k},
                                                             {e.i, e.k, e.j},
                                                             {e.j, e.i, e.k},
                                                             {e.j, e.k, e.i},
                                                             {e.k, e.i, e.j},
                                                             {e.k, e.j, e.i}}};
        std::sort(perms.begin(), perms.end());
        const auto last = std::unique(perms.begin(), perms.end());
        for (auto it = perms.begin(); it != last; ++it)
            items.push_back({(*it)[0], (*it)[1], (*it)[2], e.v});
    }
    std::sort(items.begin(), items.end(), [](const Item& x, const Item& y) {
        return std::tie(x.a, x.b, x.c) < std::tie(y.a, y.b, y.c);
    });

    std::vector<std::int32_t> row_ptr(static_cast<std::size_t>(dim) + 1, 0);
    std::vector<std::int32_t> col_idx;
    t.plan_ptr_.clear();
    t.plan_col_.clear();
    t.plan_val_.clear();
    for (std::size_t s = 0; s < items.size(); ++s) {
        const Item& it = items[s];
        const bool new_pos =
            s == 0 || items[s - 1].a != it.a || items[s - 1].b != it.b;
        if (new_pos) {
            col_idx.push_back(it.b);
            ++row_ptr[static_cast<std::size_t>(it.a) + 1];
            t.plan_ptr_.push_back(static_cast<std::int32_t>(t.plan_col_.size()));
        }
        if (!new_pos && items[s - 1].c == it.c) {
            t.plan_val_.back() += it.v;
        } else {
            t.plan_col_.push_back(it.c);
            t.plan_val_.push_back(it.v);
        }
    }
    t.plan_ptr_.push_back(static_cast<std::int32_t>(t.plan_col_.size()));
    for (int r = 0; r < dim; ++r) row_ptr[r + 1] += row_ptr[r];
    t.pattern_ = SparseMatrix(dim, dim, std::move(row_ptr), std::move(col_idx),
                              std::vector<double>(t.plan_ptr_.size() - 1, 0.0));
    return t;
}

void SparseTensor3::contract_mode3_into(const std::vector<double>& u, SparseMatrix& out) const {
    if (static_cast<int>(u.size()) != dim_)
        throw Error("dimension-mismatch", "contraction vector length");
    if (out.rows() != dim_ || out.cols() != dim_ ||
        out.values().size() != pattern_.values().size())
        out = pattern_;
    // one sparse pass: out value p = sum over the plan run of coeff * u[col]
    kernels::spmv_csr(out.values().size(), plan_ptr_.data(), plan_col_.data(), plan_val_.data(),
                      u.data(), out.values().data());
}

SparseMatrix SparseTensor3::contract_mode3(const std::vector<double>& u) const {
    SparseMatrix out = pattern_;
    contract_mode3_into(u, out);
    return out;
}

} // namespace gpe
