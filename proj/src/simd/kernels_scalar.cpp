#include <cmath>

#include "bismarck/simd/kernels.hpp"

// Reference kernels. This file is compiled for the baseline ISA (no FMA),
// so `a * b + c` keeps its two separate roundings.

namespace bismarck::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_scalar(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
}

double sum_sq_scalar(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
    return acc;
}

double sum_abs_scalar(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(v[i]);
    return acc;
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double* v, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) v[i] *= c;
}

void scale_copy_scalar(double* out, double c, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c * x[i];
}

void combine_scalar(double* out, double ca, const double* a, double cb, const double* b,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = ca * a[i] + cb * b[i];
}

void soft_threshold_scalar(double* v, double t, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::fabs(v[i]) - t;
        v[i] = std::copysign(m > 0.0 ? m : 0.0, v[i]);
    }
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k = {dot_scalar,   sum_scalar,        sum_sq_scalar,
                              sum_abs_scalar, axpy_scalar,     scale_scalar,
                              scale_copy_scalar, combine_scalar, soft_threshold_scalar,
                              "scalar"};
    return k;
}

}  // namespace bismarck::simd
