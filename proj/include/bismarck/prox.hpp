#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bismarck/tasks.hpp"

namespace bismarck {

// Proximal operators: argmin_w 1/2|v-w|^2 + alpha*P(w). Separable penalties
// also expose a per-component form so shared-memory schemes can fold the
// prox into a single-component atomic update. The componentwise expressions
// round exactly like the vectorized span forms (soft_threshold / scale
// kernels): multiply by a reciprocal rather than divide, copysign for the
// shrinkage sign.

inline double prox_component(RegKind reg, double mu, double alpha, double v) {
    switch (reg) {
        case RegKind::None:
        case RegKind::Simplex:
            return v;
        case RegKind::L1: {
            const double m = std::fabs(v) - alpha * mu;
            return std::copysign(m > 0.0 ? m : 0.0, v);
        }
        case RegKind::L2Squared:
            return v * (1.0 / (1.0 + 2.0 * alpha * mu));
        case RegKind::NonNegative:
            return v > 0.0 ? v : 0.0;
    }
    return v;
}

/// In-place prox over a contiguous span (vector kernels).
void prox_span(RegKind reg, double mu, double alpha, double* v, std::size_t n);

/// Euclidean projection onto the unit simplex {w : sum w_i = 1, w_i >= 0},
/// by the sort-and-threshold rule. Handles any input, including all-negative.
void project_simplex(double* v, std::size_t n);

/// Full-vector prox; Simplex projects, everything else delegates to the
/// componentwise form.
void prox(RegKind reg, double mu, double alpha, std::vector<double>& v);

}  // namespace bismarck
