#include "gpe/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace gpe::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void scal_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void spmv_csr_scalar(std::size_t n_rows, const std::int32_t* row_ptr, const std::int32_t* col_idx,
                     const double* vals, const double* x, double* y) {
    for (std::size_t r = 0; r < n_rows; ++r) {
        double s = 0.0;
        for (std::int32_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += vals[p] * x[col_idx[p]];
        y[r] = s;
    }
}

bool cpu_has_avx2() {
#if defined(GPE_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<const detail::Vtable*>& active_vtable() {
    static std::atomic<const detail::Vtable*> vt{nullptr};
    return vt;
}

std::atomic<Backend>& active_backend() {
    static std::atomic<Backend> b{Backend::scalar};
    return b;
}

void install(Backend b) {
    switch (b) {
#if defined(GPE_HAVE_AVX2)
    case Backend::avx2:
        active_vtable().store(&detail::avx2_vtable(), std::memory_order_release);
        break;
#endif
    default:
        b = Backend::scalar;
        active_vtable().store(&detail::scalar_vtable(), std::memory_order_release);
        break;
    }
    active_backend().store(b, std::memory_order_release);
}

const detail::Vtable& vt() {
    const detail::Vtable* p = active_vtable().load(std::memory_order_acquire);
    if (!p) {
        Backend pick = available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
        if (const char* env = std::getenv("GPE_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) pick = Backend::scalar;
            else if (std::strcmp(env, "avx2") == 0 && available(Backend::avx2)) pick = Backend::avx2;
        }
        install(pick);
        p = active_vtable().load(std::memory_order_acquire);
    }
    return *p;
}

} // namespace

namespace detail {

const Vtable& scalar_vtable() {
    static const Vtable t{dot_scalar, axpy_scalar, axpby_scalar, scal_scalar, spmv_csr_scalar};
    return t;
}

} // namespace detail

const char* name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool available(Backend b) {
    if (b == Backend::scalar) return true;
    return cpu_has_avx2();
}

Backend active() {
    vt();
    return active_backend().load(std::memory_order_acquire);
}

bool set_backend(Backend b) {
    if (!available(b)) return false;
    install(b);
    return true;
}

double dot(const double* x, const double* y, std::size_t n) { return vt().dot(x, y, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { vt().axpy(a, x, y, n); }
void axpby(double a, const double* x, double b, double* y, std::size_t n) {
    vt().axpby(a, x, b, y, n);
}
void scal(double a, double* x, std::size_t n) { vt().scal(a, x, n); }
void spmv_csr(std::size_t n_rows, const std::int32_t* row_ptr, const std::int32_t* col_idx,
              const double* vals, const double* x, double* y) {
    vt().spmv_csr(n_rows, row_ptr, col_idx, vals, x, y);
}

} // namespace gpe::kernels
