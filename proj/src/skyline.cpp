#include "gpe/skyline.hpp"

#include "gpe/error.hpp"
#include "gpe/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace gpe {

namespace {

std::vector<std::int32_t> bfs_levels(const SparseMatrix& p, std::int32_t root,
                                     std::vector<std::int32_t>& order) {
    const int n = p.rows();
    std::vector<std::int32_t> level(static_cast<std::size_t>(n), -1);
    order.clear();
    order.reserve(static_cast<std::size_t>(n));
    std::queue<std::int32_t> q;
    q.push(root);
    level[root] = 0;
    while (!q.empty()) {
        const std::int32_t u = q.front();
        q.pop();
        order.push_back(u);
        for (std::int32_t pp = p.row_ptr()[u]; pp < p.row_ptr()[u + 1]; ++pp) {
            const std::int32_t v = p.col_idx()[pp];
            if (v != u && level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            }
        }
    }
    return level;
}

} // namespace

std::vector<std::int32_t> rcm_ordering(const SparseMatrix& pattern) {
    const int n = pattern.rows();
    std::vector<std::int32_t> degree(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) degree[i] = pattern.row_ptr()[i + 1] - pattern.row_ptr()[i];

    std::vector<std::int32_t> result;
    result.reserve(static_cast<std::size_t>(n));
    std::vector<char> placed(static_cast<std::size_t>(n), 0);

    for (;;) {
        // next unplaced vertex of minimum degree seeds a component
        std::int32_t root = -1;
        for (int i = 0; i < n; ++i)
            if (!placed[i] && (root < 0 || degree[i] < degree[root])) root = i;
        if (root < 0) break;

        // one double-BFS sweep toward a pseudo-peripheral root
        std::vector<std::int32_t> order;
        std::vector<std::int32_t> lvl = bfs_levels(pattern, root, order);
        std::int32_t far = order.back();
        if (far != root) {
            bfs_levels(pattern, far, order);
            root = far;
        }

        // Cuthill-McKee from root: neighbors visited in ascending degree
        std::vector<std::int32_t> comp;
        std::queue<std::int32_t> q;
        q.push(root);
        placed[root] = 1;
        std::vector<std::int32_t> nbrs;
        while (!q.empty()) {
            const std::int32_t u = q.front();
            q.pop();
            comp.push_back(u);
            nbrs.clear();
            for (std::int32_t pp = pattern.row_ptr()[u]; pp < pattern.row_ptr()[u + 1]; ++pp) {
                const std::int32_t v = pattern.col_idx()[pp];
                if (v != u && !placed[v]) {
                    placed[v] = 1;
                    nbrs.push_back(v);
                }
            }
            std::sort(nbrs.begin(), nbrs.end(), [&](std::int32_t a, std::int32_t b) {
                if (degree[a] != degree[b]) return degree[a] < degree[b];
                return a < b;
            });
            for (std::int32_t v : nbrs) q.push(v);
        }
        std::reverse(comp.begin(), comp.end());
        result.insert(result.end(), comp.begin(), comp.end());
    }
    return result;
}

SkylineCholesky::SkylineCholesky(const SparseMatrix& pattern) {
    if (pattern.rows() != pattern.cols()) throw Error("dimension-mismatch", "skyline needs square");
    n_ = pattern.rows();
    perm_ = rcm_ordering(pattern);
    iperm_.assign(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) iperm_[perm_[i]] = i;

    first_.assign(static_cast<std::size_t>(n_), 0);
    for (int i = 0; i < n_; ++i) first_[i] = i;
    for (int old_r = 0; old_r < n_; ++old_r) {
        const std::int32_t r = iperm_[old_r];
        for (std::int32_t p = pattern.row_ptr()[old_r]; p < pattern.row_ptr()[old_r + 1]; ++p) {
            const std::int32_t c = iperm_[pattern.col_idx()[p]];
            if (c < r) first_[r] = std::min(first_[r], c);
            else if (c > r) first_[c] = std::min(first_[c], r);
        }
    }
    row_begin_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int i = 0; i < n_; ++i) row_begin_[i + 1] = row_begin_[i] + (i - first_[i] + 1);
    vals_.assign(static_cast<std::size_t>(row_begin_[n_]), 0.0);
}

bool SkylineCholesky::factorize(const SparseMatrix& a, const SparseMatrix* b, double sigma) {
    factored_ = false;
    std::fill(vals_.begin(), vals_.end(), 0.0);

    auto scatter = [&](const SparseMatrix& m, double scale) {
        for (int old_r = 0; old_r < n_; ++old_r) {
            const std::int32_t r = iperm_[old_r];
            for (std::int32_t p = m.row_ptr()[old_r]; p < m.row_ptr()[old_r + 1]; ++p) {
                const std::int32_t c = iperm_[m.col_idx()[p]];
                if (c <= r) vals_[row_begin_[r] + (c - first_[r])] += scale * m.values()[p];
            }
        }
    };
    scatter(a, 1.0);
    if (b && sigma != 0.0) scatter(*b, -sigma);

    // row-oriented envelope Cholesky; inner products run over the contiguous
    // overlap of two envelope rows
    for (int i = 0; i < n_; ++i) {
        double* ri = vals_.data() + row_begin_[i];
        const std::int32_t fi = first_[i];
        for (int j = fi; j < i; ++j) {
            const double* rj = vals_.data() + row_begin_[j];
            const std::int32_t fj = first_[j];
            const std::int32_t lo = std::max(fi, fj);
            const std::int32_t len = j - lo;
            double s = ri[j - fi];
            if (len > 0) s -= kernels::dot(ri + (lo - fi), rj + (lo - fj), len);
            ri[j - fi] = s / rj[j - fj];
        }
        double d = ri[i - fi];
        const std::int32_t len = i - fi;
        if (len > 0) d -= kernels::dot(ri, ri, len);
        if (!(d > 0.0)) return false;
        ri[i - fi] = std::sqrt(d);
    }
    factored_ = true;
    return true;
}

std::vector<double> SkylineCholesky::solve(const std::vector<double>& rhs) const {
    if (!factored_) throw Error("not-converged", "skyline solve before successful factorization");
    if (static_cast<int>(rhs.size()) != n_) throw Error("dimension-mismatch", "skyline rhs size");

    std::vector<double> y(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) y[i] = rhs[perm_[i]];

    for (int i = 0; i < n_; ++i) {
        const double* ri = vals_.data() + row_begin_[i];
        const std::int32_t fi = first_[i];
        double s = y[i];
        if (i > fi) s -= kernels::dot(ri, y.data() + fi, i - fi);
        y[i] = s / ri[i - fi];
    }
    for (int i = n_ - 1; i >= 0; --i) {
        const double* ri = vals_.data() + row_begin_[i];
        const std::int32_t fi = first_[i];
        const double xi = y[i] / ri[i - fi];
        y[i] = xi;
        if (i > fi) kernels::axpy(-xi, ri, y.data() + fi, i - fi);
    }

    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[perm_[i]] = y[i];
    return x;
}

} // namespace gpe
