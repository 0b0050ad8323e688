#include "bismarck/prox.hpp"

#include <algorithm>
#include <numeric>

#include "bismarck/simd/kernels.hpp"

namespace bismarck {

void prox_span(RegKind reg, double mu, double alpha, double* v, std::size_t n) {
    switch (reg) {
        case RegKind::None:
        case RegKind::Simplex:
            return;
        case RegKind::L1:
            simd::soft_threshold(v, alpha * mu, n);
            return;
        case RegKind::L2Squared:
            simd::scale(v, 1.0 / (1.0 + 2.0 * alpha * mu), n);
            return;
        case RegKind::NonNegative:
            for (std::size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
            return;
    }
}

void project_simplex(double* v, std::size_t n) {
    if (n == 0) return;
    // Sort descending, find the largest k with u_k + (1 - sum_{i<=k} u_i)/k > 0,
    // then shift by that threshold and clamp.
    std::vector<double> u(v, v + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0;
    double theta = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += u[i];
        const double cand = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - cand > 0.0) {
            theta = cand;
            k = i + 1;
        }
    }
    (void)k;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = v[i] - theta;
        v[i] = w > 0.0 ? w : 0.0;
    }
}

void prox(RegKind reg, double mu, double alpha, std::vector<double>& v) {
    if (reg == RegKind::Simplex) {
        project_simplex(v.data(), v.size());
        return;
    }
    prox_span(reg, mu, alpha, v.data(), v.size());
}

}  // namespace bismarck
