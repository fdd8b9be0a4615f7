#include "gpe/dense.hpp"

#include "gpe/error.hpp"
#include "gpe/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gpe {

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s) {
    DenseMatrix d(s.rows(), s.cols());
    for (int r = 0; r < s.rows(); ++r)
        for (std::int32_t p = s.row_ptr()[r]; p < s.row_ptr()[r + 1]; ++p)
            d(r, s.col_idx()[p]) += s.values()[p];
    return d;
}

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix d(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = 1.0;
    return d;
}

std::vector<double> DenseMatrix::multiply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw Error("dimension-mismatch", "dense gemv");
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for (int r = 0; r < rows_; ++r) {
        const double* a = row(r);
        double s = 0.0;
        for (int c = 0; c < cols_; ++c) s += a[c] * x[c];
        y[r] = s;
    }
    return y;
}

bool cholesky_factor(DenseMatrix& a) {
    const int n = a.rows();
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
            a(i, j) = s / ljj;
        }
    }
    // zero strict upper triangle so the factor can be used as-is
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) a(r, c) = 0.0;
    return true;
}

void cholesky_solve(const DenseMatrix& l, std::vector<double>& x) {
    const int n = l.rows();
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
}

bool lu_solve(DenseMatrix a, std::vector<double>& x) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(x.size()) != n)
        throw Error("dimension-mismatch", "lu_solve shapes");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
            std::swap(x[col], x[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            x[r] -= f * x[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = x[r];
        for (int c = r + 1; c < n; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return true;
}

void jacobi_eigensolve(DenseMatrix a, std::vector<double>& eigenvalues, DenseMatrix& eigenvectors) {
    const int n = a.rows();
    eigenvectors = DenseMatrix::identity(n);
    if (n == 0) {
        eigenvalues.clear();
        return;
    }

    auto off_norm = [&] {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) s += a(r, c) * a(r, c);
        return std::sqrt(2.0 * s);
    };

    double scale = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
    const double tol = (scale > 0.0 ? scale : 1.0) * 1e-15;

    for (int sweep = 0; sweep < 60 && off_norm() > tol * n; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol * 1e-2) continue;
                const double app = a(p, p), aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = eigenvectors(k, p), vkq = eigenvectors(k, q);
                    eigenvectors(k, p) = c * vkp - s * vkq;
                    eigenvectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    eigenvalues.resize(static_cast<std::size_t>(n));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    DenseMatrix sorted_vecs(n, n);
    for (int c = 0; c < n; ++c) {
        eigenvalues[c] = a(order[c], order[c]);
        for (int r = 0; r < n; ++r) sorted_vecs(r, c) = eigenvectors(r, order[c]);
    }
    eigenvectors = std::move(sorted_vecs);
}

DenseEigResult dense_generalized_smallest(const DenseMatrix& a, const DenseMatrix& b,
                                          double pivot_floor) {
    const int n = a.rows();
    if (a.cols() != n || b.rows() != n || b.cols() != n)
        throw Error("dimension-mismatch", "generalized eigensolve shapes");

    DenseMatrix l = b;
    if (!cholesky_factor(l)) throw Error("indefinite-mass", "mass matrix is not positive definite");
    if (pivot_floor > 0.0) {
        double bscale = 0.0;
        for (int i = 0; i < n; ++i) bscale = std::max(bscale, std::abs(b(i, i)));
        for (int i = 0; i < n; ++i)
            if (l(i, i) * l(i, i) < pivot_floor * bscale)
                throw Error("mass-block-singular", "mass pivot below threshold");
    }

    // C = inv(L) A inv(L)'
    DenseMatrix c = a;
    for (int col = 0; col < n; ++col) { // forward solve L X = A columnwise (on rows)
        for (int i = 0; i < n; ++i) {
            double s = c(i, col);
            for (int k = 0; k < i; ++k) s -= l(i, k) * c(k, col);
            c(i, col) = s / l(i, i);
        }
    }
    for (int r = 0; r < n; ++r) { // then rowwise: C := C inv(L)'
        for (int j = 0; j < n; ++j) {
            double s = c(r, j);
            for (int k = 0; k < j; ++k) s -= c(r, k) * l(j, k);
            c(r, j) = s / l(j, j);
        }
    }
    // symmetrize against rounding drift
    for (int r = 0; r < n; ++r)
        for (int cidx = r + 1; cidx < n; ++cidx) {
            const double m = 0.5 * (c(r, cidx) + c(cidx, r));
            c(r, cidx) = m;
            c(cidx, r) = m;
        }

    std::vector<double> evals;
    DenseMatrix evecs;
    jacobi_eigensolve(std::move(c), evals, evecs);

    DenseEigResult out;
    out.lambda = evals[0];
    out.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) out.x[i] = evecs(i, 0);
    // back-substitute: x = inv(L)' y, then x' B x = y' y = 1 already
    for (int i = n - 1; i >= 0; --i) {
        double s = out.x[i];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * out.x[k];
        out.x[i] = s / l(i, i);
    }
    return out;
}

} // namespace gpe
