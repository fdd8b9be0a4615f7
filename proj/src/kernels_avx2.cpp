// AVX2 + FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; it is reached solely through the dispatch table after a
// runtime cpuid check.

#include "gpe/kernels.hpp"

#include <immintrin.h>

namespace gpe::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpby_avx2(double a, const double* x, double b, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void scal_avx2(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void spmv_csr_avx2(std::size_t n_rows, const std::int32_t* row_ptr, const std::int32_t* col_idx,
                   const double* vals, const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::int32_t lo = row_ptr[r];
        const std::int32_t hi = row_ptr[r + 1];
        std::int32_t p = lo;
        __m256d acc = _mm256_setzero_pd();
        for (; p + 4 <= hi; p += 4) {
            const __m128i ci = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col_idx + p));
            const __m256d xv = _mm256_i32gather_pd(x, ci, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + p), xv, acc);
        }
        double s = hsum(acc);
        for (; p < hi; ++p) s += vals[p] * x[col_idx[p]];
        y[r] = s;
    }
}

} // namespace

const Vtable& avx2_vtable() {
    static const Vtable t{dot_avx2, axpy_avx2, axpby_avx2, scal_avx2, spmv_csr_avx2};
    return t;
}

} // namespace gpe::kernels::detail
