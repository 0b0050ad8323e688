// AVX2 kernel variants. Compiled with -mavx2 -mfma -ffp-contract=off; the
// whole file is a no-op stub when __AVX2__ is not defined so non-x86 builds
// still link.

#include "bismarck/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace bismarck::simd {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_avx2(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += v[i];
    return s;
}

double sum_sq_avx2(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        acc = _mm256_fmadd_pd(x, x, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += v[i] * v[i];
    return s;
}

double sum_abs_avx2(const double* v, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(v + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(v[i]);
    return s;
}

// Elementwise kernels: separate mul and add, matching the scalar variant
// bit for bit (see kernels.hpp).

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double* v, double c, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(v + i, _mm256_mul_pd(vc, _mm256_loadu_pd(v + i)));
    }
    for (; i < n; ++i) v[i] *= c;
}

void scale_copy_avx2(double* out, double c, const double* x, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) out[i] = c * x[i];
}

void combine_avx2(double* out, double ca, const double* a, double cb, const double* b,
                  std::size_t n) {
    const __m256d vca = _mm256_set1_pd(ca);
    const __m256d vcb = _mm256_set1_pd(cb);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d pa = _mm256_mul_pd(vca, _mm256_loadu_pd(a + i));
        const __m256d pb = _mm256_mul_pd(vcb, _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(pa, pb));
    }
    for (; i < n; ++i) out[i] = ca * a[i] + cb * b[i];
}

void soft_threshold_avx2(double* v, double t, std::size_t n) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000LL));
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        const __m256d m = _mm256_max_pd(_mm256_sub_pd(_mm256_and_pd(abs_mask, x), vt), zero);
        _mm256_storeu_pd(v + i, _mm256_or_pd(m, _mm256_and_pd(sign_mask, x)));
    }
    for (; i < n; ++i) {
        const double m = std::fabs(v[i]) - t;
        v[i] = std::copysign(m > 0.0 ? m : 0.0, v[i]);
    }
}

}  // namespace

const Kernels* avx2_kernels_or_null() {
    static const Kernels k = {dot_avx2,     sum_avx2,        sum_sq_avx2,
                              sum_abs_avx2, axpy_avx2,       scale_avx2,
                              scale_copy_avx2, combine_avx2, soft_threshold_avx2,
                              "avx2"};
    return &k;
}

}  // namespace bismarck::simd

#else

namespace bismarck::simd {
const Kernels* avx2_kernels_or_null() { return nullptr; }
}  // namespace bismarck::simd

#endif
