#pragma once

#include <cstddef>
#include <cstdint>

// Dense double-precision kernels used by the gradient and loss inner loops.
// A scalar reference implementation always exists; an AVX2 variant is
// selected at runtime when the CPU supports it (override with
// BISMARCK_SIMD=scalar|avx2 in the environment).
//
// Rounding contract: the elementwise kernels (axpy, scale, scale_copy,
// combine, soft_threshold) produce bit-identical results in every variant --
// one multiply rounding and one add rounding per component, never fused.
// The shared-memory update path applies the same arithmetic one component
// at a time, and single-worker shared runs must match sequential runs
// bit for bit. Reductions (dot, sum*) may reassociate and are only
// tolerance-comparable across variants.

namespace bismarck::simd {

struct Kernels {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* v, std::size_t n);
    double (*sum_sq)(const double* v, std::size_t n);
    double (*sum_abs)(const double* v, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // v[i] *= c
    void (*scale)(double* v, double c, std::size_t n);
    // out[i] = c * x[i]
    void (*scale_copy)(double* out, double c, const double* x, std::size_t n);
    // out[i] = ca * a[i] + cb * b[i]
    void (*combine)(double* out, double ca, const double* a, double cb, const double* b,
                    std::size_t n);
    // v[i] = copysign(max(|v[i]| - t, 0), v[i])
    void (*soft_threshold)(double* v, double t, std::size_t n);
    const char* name;
};

const Kernels& scalar_kernels();

// nullptr when this build has no AVX2 translation unit or the flag was off.
const Kernels* avx2_kernels_or_null();

/// Kernel table picked once per process (CPU probe + env override).
const Kernels& active();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline double sum(const double* v, std::size_t n) { return active().sum(v, n); }
inline double sum_sq(const double* v, std::size_t n) { return active().sum_sq(v, n); }
inline double sum_abs(const double* v, std::size_t n) { return active().sum_abs(v, n); }
inline void axpy(double* y, double a, const double* x, std::size_t n) {
    active().axpy(y, a, x, n);
}
inline void scale(double* v, double c, std::size_t n) { active().scale(v, c, n); }
inline void scale_copy(double* out, double c, const double* x, std::size_t n) {
    active().scale_copy(out, c, x, n);
}
inline void combine(double* out, double ca, const double* a, double cb, const double* b,
                    std::size_t n) {
    active().combine(out, ca, a, cb, b, n);
}
inline void soft_threshold(double* v, double t, std::size_t n) {
    active().soft_threshold(v, t, n);
}

// Sparse counterparts. Scalar on purpose: AVX2 has no scatter, and these
// loops are index-bound anyway. Defined once so every caller rounds alike.
inline double sparse_dot(const double* w, const std::uint32_t* idx, const double* val,
                         std::size_t nnz) {
    double acc = 0.0;
    for (std::size_t t = 0; t < nnz; ++t) acc += w[idx[t]] * val[t];
    return acc;
}

inline void sparse_axpy(double* w, double a, const std::uint32_t* idx, const double* val,
                        std::size_t nnz) {
    for (std::size_t t = 0; t < nnz; ++t) w[idx[t]] += a * val[t];
}

}  // namespace bismarck::simd
