#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Dense and sparse arithmetic inner loops used throughout the solver.
// Each kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant. The backend is picked once at startup
// (overridable with GPE_KERNELS=scalar|avx2); the two variants are held to
// agree within rounding by the kernel equivalence tests.

namespace gpe::kernels {

enum class Backend { scalar, avx2 };

const char* name(Backend b);
bool available(Backend b);

/// Backend currently routing the kernels below.
Backend active();

/// Force a backend (tests, benchmarking). Returns false if unavailable.
bool set_backend(Backend b);

double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);            // y += a*x
void axpby(double a, const double* x, double b, double* y, std::size_t n); // y = a*x + b*y
void scal(double a, double* x, std::size_t n);

/// y = A*x for a CSR matrix with int32 indices.
void spmv_csr(std::size_t n_rows, const std::int32_t* row_ptr, const std::int32_t* col_idx,
              const double* vals, const double* x, double* y);

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
    return dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    axpy(a, x.data(), y.data(), x.size());
}
inline void axpby(double a, const std::vector<double>& x, double b, std::vector<double>& y) {
    axpby(a, x.data(), b, y.data(), x.size());
}
inline void scal(double a, std::vector<double>& x) { scal(a, x.data(), x.size()); }

namespace detail {

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*axpby)(double, const double*, double, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    void (*spmv_csr)(std::size_t, const std::int32_t*, const std::int32_t*, const double*,
                     const double*, double*);
};

const Vtable& scalar_vtable();
#if defined(GPE_HAVE_AVX2)
const Vtable& avx2_vtable();
#endif

} // namespace detail

} // namespace gpe::kernels
