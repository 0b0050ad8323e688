#pragma once

// Test-only oracles, kept independent of the engine's kernels and gradient
// code: plain loops, their own objective evaluations.

#include <array>
#include <cstdint>
#include <vector>

#include "bismarck/dataset.hpp"
#include "bismarck/igd.hpp"
#include "bismarck/model.hpp"
#include "bismarck/tasks.hpp"

namespace oracles {

/// Central finite differences of loss_term with respect to every flat model
/// parameter.
std::vector<double> fd_gradient(const bismarck::TaskSpec& task, const bismarck::Model& model,
                                const bismarck::ExampleView& ex, double h = 1e-6);

/// 0.5*|v - w|^2 + alpha*P(w). Constraint penalties are 0/+infinity with a
/// small feasibility tolerance.
double prox_objective(bismarck::RegKind reg, double mu, double alpha,
                      const std::vector<double>& v, const std::vector<double>& w);

/// argmin over a 1-D grid of 0.5*(v-w)^2 + t*|w|, w in [lo, hi].
double grid_min_soft_threshold(double v, double t, double lo, double hi, int steps);

/// Brute-force Euclidean projection of a 2-vector onto the unit simplex by
/// scanning w1 in [0, 1].
std::array<double, 2> simplex_grid_projection_2d(const std::array<double, 2>& v, int steps);

struct BatchResult {
    std::vector<double> w;
    double objective = 0.0;
    double grad_norm = 0.0;
    std::size_t iterations = 0;
};

/// Full-batch gradient descent with backtracking for the smooth vector tasks
/// (LS, LR; penalty None or L2Squared), run until |grad| <= tol.
BatchResult batch_gd(const bismarck::Dataset& data, bismarck::TaskKind kind,
                     bismarck::RegKind reg, double mu, std::uint32_t dim, double tol = 1e-10,
                     std::size_t max_iters = 200000);

/// Full-batch subgradient method for the hinge objective (diminishing steps,
/// best objective tracked). Upper-bounds the true optimum.
BatchResult batch_subgradient_svm(const bismarck::Dataset& data, std::uint32_t dim,
                                  std::size_t iters = 200000);

/// Objective evaluated with oracle loops (no engine code).
double objective_of(const bismarck::Dataset& data, bismarck::TaskKind kind, bismarck::RegKind reg,
                    double mu, const std::vector<double>& w);

}  // namespace oracles
