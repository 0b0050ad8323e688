#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bismarck/example.hpp"
#include "bismarck/model.hpp"

namespace bismarck {

enum class TaskKind : std::uint8_t { LeastSquares, Logistic, Svm, Lmf, Portfolio };
enum class RegKind : std::uint8_t { None, L1, L2Squared, NonNegative, Simplex };

const char* task_name(TaskKind t);
std::optional<TaskKind> task_from_name(const std::string& name);
const char* reg_name(RegKind r);
std::optional<RegKind> reg_from_name(const std::string& name);

// Objective identifier plus hyperparameters. For LMF the Frobenius penalty
// mu*(|L|_F^2 + |R|_F^2) is distributed over observed cells as
// mu/cells(row i) and mu/cells(col j), so summing per-example terms over one
// epoch recovers the global objective exactly once; the divisor counts come
// from ingestion. For Portfolio the "dataset" is a single synthetic tuple:
// every step uses the full gradient p + 2*Sigma*w followed by the simplex
// projection.
struct TaskSpec {
    TaskKind task = TaskKind::LeastSquares;
    std::uint32_t dim = 0;                    // d for vector tasks
    std::uint32_t rows = 0, cols = 0, rank = 0;  // LMF
    RegKind reg = RegKind::None;
    double mu = 0.0;
    std::vector<double> returns;     // Portfolio p (length d)
    std::vector<double> covariance;  // Portfolio Sigma, d*d row-major
    std::vector<std::uint32_t> row_cells, col_cells;  // LMF divisors

    void validate() const;  // throws DataError
    bool classification() const { return task == TaskKind::Logistic || task == TaskKind::Svm; }
    /// True when the prox is componentwise and may be applied to only the
    /// touched coordinates of a sparse step.
    bool separable_reg() const { return reg != RegKind::Simplex; }
    /// Regularizer actually applied by the prox step. LMF's penalty is folded
    /// into the gradient, so its prox is the identity.
    RegKind prox_reg() const { return task == TaskKind::Lmf ? RegKind::None : reg; }
    Model make_model() const;
};

// Touched components of one incremental gradient, in the model's flat
// parameter space. Dense tasks and LMF fill contiguous runs; sparse vector
// tasks fill scattered indices. Buffers are reused across steps.
struct GradientUpdate {
    struct Run {
        std::uint32_t param_start;
        std::uint32_t len;
        std::uint32_t delta_start;
    };
    std::vector<Run> runs;
    std::vector<std::uint32_t> index;  // scattered param indices
    std::vector<double> delta;         // run payloads first, then scattered

    void clear() {
        runs.clear();
        index.clear();
        delta.clear();
    }
    bool empty() const { return runs.empty() && index.empty(); }
    bool finite() const;
    /// Expands into a dense vector of length n (testing/oracles).
    std::vector<double> to_dense(std::size_t n) const;
};

/// Per-example gradient at `model`. Sparse examples touch only their nonzero
/// indices; LMF touches exactly L row i and R row j.
void grad(const TaskSpec& task, const Model& model, const ExampleView& ex, GradientUpdate& out);

/// Per-example objective term f_i. For LMF this includes the distributed
/// Frobenius share, so it is exactly what `grad` differentiates.
double loss_term(const TaskSpec& task, const Model& model, const ExampleView& ex);

/// Regularizer value P(model): mu*|w|_1, mu*|w|^2, or 0/+inf feasibility for
/// constraint sets. LMF returns 0 (the penalty lives in the cell terms).
double penalty(const TaskSpec& task, const Model& model);

struct Prediction {
    double score = 0.0;  // w.x, or L_i.R_j
    int label = 1;       // classification only; score 0 breaks to +1
};

Prediction predict(const TaskSpec& task, const Model& model, const ExampleView& ex);

}  // namespace bismarck
