#include "bismarck/tasks.hpp"

#include <cmath>
#include <limits>

#include "bismarck/simd/kernels.hpp"

namespace bismarck {

namespace {

// Numerically stable 1/(1+exp(-t)).
double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Numerically stable log(1+exp(z)).
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double score_of(const TaskSpec& task, const Model& model, const ExampleView& ex) {
    switch (ex.kind) {
        case ExampleKind::Dense:
            return simd::dot(model.coef.data(), ex.values.data(), ex.values.size());
        case ExampleKind::Sparse:
            return simd::sparse_dot(model.coef.data(), ex.indices.data(), ex.values.data(),
                                    ex.values.size());
        case ExampleKind::MatrixCell:
            return simd::dot(model.lrow(ex.row), model.rrow(ex.col), task.rank);
    }
    return 0.0;
}

// Scalar gradient factor g for the linear-score tasks; the per-example
// gradient is g * x. Zero means "no update" (satisfied hinge margin).
double gradient_factor(TaskKind task, double score, double y) {
    switch (task) {
        case TaskKind::LeastSquares:
            return score - y;
        case TaskKind::Logistic:
            return -y * sigmoid(-y * score);
        case TaskKind::Svm:
            return (1.0 - y * score > 0.0) ? -y : 0.0;
        default:
            return 0.0;
    }
}

void check_vector_dims(const TaskSpec& task, const Model& model, const ExampleView& ex) {
    if (model.kind != Model::Kind::Vector || model.coef.size() != task.dim) {
        throw DataError("model does not match task dimension");
    }
    if (ex.kind == ExampleKind::Dense && ex.values.size() != task.dim) {
        throw DataError("dense example arity " + std::to_string(ex.values.size()) +
                        " != d=" + std::to_string(task.dim));
    }
    if (ex.kind == ExampleKind::Sparse && !ex.indices.empty() && ex.indices.back() >= task.dim) {
        throw DataError("sparse index out of range");
    }
    if (ex.kind == ExampleKind::MatrixCell) throw DataError("matrix cell fed to a vector task");
}

void check_cell_dims(const TaskSpec& task, const Model& model, const ExampleView& ex) {
    if (model.kind != Model::Kind::Factors || model.rows != task.rows ||
        model.cols != task.cols || model.rank != task.rank) {
        throw DataError("factor model does not match task shape");
    }
    if (ex.kind != ExampleKind::MatrixCell) throw DataError("LMF needs matrix-cell examples");
    if (ex.row >= task.rows || ex.col >= task.cols) throw DataError("cell outside matrix shape");
}

}  // namespace

const char* task_name(TaskKind t) {
    switch (t) {
        case TaskKind::LeastSquares: return "ls";
        case TaskKind::Logistic: return "lr";
        case TaskKind::Svm: return "svm";
        case TaskKind::Lmf: return "lmf";
        case TaskKind::Portfolio: return "portfolio";
    }
    return "?";
}

std::optional<TaskKind> task_from_name(const std::string& name) {
    if (name == "ls") return TaskKind::LeastSquares;
    if (name == "lr") return TaskKind::Logistic;
    if (name == "svm") return TaskKind::Svm;
    if (name == "lmf") return TaskKind::Lmf;
    if (name == "portfolio") return TaskKind::Portfolio;
    return std::nullopt;
}

const char* reg_name(RegKind r) {
    switch (r) {
        case RegKind::None: return "none";
        case RegKind::L1: return "l1";
        case RegKind::L2Squared: return "l2";
        case RegKind::NonNegative: return "nonneg";
        case RegKind::Simplex: return "simplex";
    }
    return "?";
}

std::optional<RegKind> reg_from_name(const std::string& name) {
    if (name == "none") return RegKind::None;
    if (name == "l1") return RegKind::L1;
    if (name == "l2") return RegKind::L2Squared;
    if (name == "nonneg") return RegKind::NonNegative;
    if (name == "simplex") return RegKind::Simplex;
    return std::nullopt;
}

void TaskSpec::validate() const {
    if (mu < 0.0) throw DataError("mu must be >= 0");
    switch (task) {
        case TaskKind::LeastSquares:
        case TaskKind::Logistic:
        case TaskKind::Svm:
            if (dim == 0) throw DataError("task dimension must be >= 1");
            if (reg == RegKind::Simplex) {
                throw DataError("simplex constraint is only used by the portfolio task");
            }
            break;
        case TaskKind::Lmf:
            if (rows == 0 || cols == 0 || rank == 0) {
                throw DataError("LMF needs m, n >= 1 and rank >= 1");
            }
            if (reg != RegKind::None && reg != RegKind::L2Squared) {
                throw DataError("LMF supports only the Frobenius (l2) penalty");
            }
            if (mu > 0.0 && (row_cells.size() != rows || col_cells.size() != cols)) {
                throw DataError("LMF with mu > 0 needs per-row/per-column cell counts");
            }
            break;
        case TaskKind::Portfolio: {
            if (dim == 0) throw DataError("task dimension must be >= 1");
            if (reg != RegKind::Simplex) throw DataError("portfolio requires the simplex constraint");
            if (returns.size() != dim) throw DataError("returns vector must have length d");
            if (covariance.size() != static_cast<std::size_t>(dim) * dim) {
                throw DataError("covariance must be d x d");
            }
            for (std::uint32_t i = 0; i < dim; ++i) {
                for (std::uint32_t j = i + 1; j < dim; ++j) {
                    const double a = covariance[static_cast<std::size_t>(i) * dim + j];
                    const double b = covariance[static_cast<std::size_t>(j) * dim + i];
                    if (std::fabs(a - b) > 1e-12) {
                        throw DataError("covariance is not symmetric to 1e-12");
                    }
                }
            }
            break;
        }
    }
}

Model TaskSpec::make_model() const {
    if (task == TaskKind::Lmf) return Model::factors(rows, cols, rank);
    return Model::vector(dim);
}

bool GradientUpdate::finite() const {
    for (double d : delta)
        if (!std::isfinite(d)) return false;
    return true;
}

std::vector<double> GradientUpdate::to_dense(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (const Run& r : runs) {
        for (std::uint32_t t = 0; t < r.len; ++t) out[r.param_start + t] += delta[r.delta_start + t];
    }
    const std::size_t scatter_base = delta.size() - index.size();
    for (std::size_t t = 0; t < index.size(); ++t) out[index[t]] += delta[scatter_base + t];
    return out;
}

void grad(const TaskSpec& task, const Model& model, const ExampleView& ex, GradientUpdate& out) {
    out.clear();
    switch (task.task) {
        case TaskKind::LeastSquares:
        case TaskKind::Logistic:
        case TaskKind::Svm: {
            check_vector_dims(task, model, ex);
            const double g = gradient_factor(task.task, score_of(task, model, ex), ex.label);
            if (g == 0.0) return;
            const std::size_t nnz = ex.values.size();
            out.delta.resize(nnz);
            simd::scale_copy(out.delta.data(), g, ex.values.data(), nnz);
            if (ex.kind == ExampleKind::Dense) {
                out.runs.push_back({0, static_cast<std::uint32_t>(nnz), 0});
            } else {
                out.index.assign(ex.indices.begin(), ex.indices.end());
            }
            return;
        }
        case TaskKind::Lmf: {
            check_cell_dims(task, model, ex);
            const std::uint32_t r = task.rank;
            const double* li = model.lrow(ex.row);
            const double* rj = model.rrow(ex.col);
            const double e = simd::dot(li, rj, r) - ex.label;
            const double sl = task.mu > 0.0 ? 2.0 * task.mu / task.row_cells[ex.row] : 0.0;
            const double sr = task.mu > 0.0 ? 2.0 * task.mu / task.col_cells[ex.col] : 0.0;
            out.delta.resize(2 * static_cast<std::size_t>(r));
            simd::combine(out.delta.data(), 2.0 * e, rj, sl, li, r);
            simd::combine(out.delta.data() + r, 2.0 * e, li, sr, rj, r);
            out.runs.push_back({static_cast<std::uint32_t>(model.lrow_offset(ex.row)), r, 0});
            out.runs.push_back({static_cast<std::uint32_t>(model.rrow_offset(ex.col)), r, r});
            return;
        }
        case TaskKind::Portfolio: {
            const std::uint32_t d = task.dim;
            if (model.coef.size() != d) throw DataError("model does not match task dimension");
            out.delta.resize(d);
            const double* w = model.coef.data();
            for (std::uint32_t i = 0; i < d; ++i) {
                const double* sig_row = task.covariance.data() + static_cast<std::size_t>(i) * d;
                out.delta[i] = task.returns[i] + 2.0 * simd::dot(sig_row, w, d);
            }
            out.runs.push_back({0, d, 0});
            return;
        }
    }
}

double loss_term(const TaskSpec& task, const Model& model, const ExampleView& ex) {
    switch (task.task) {
        case TaskKind::LeastSquares: {
            check_vector_dims(task, model, ex);
            const double rsd = score_of(task, model, ex) - ex.label;
            return 0.5 * rsd * rsd;
        }
        case TaskKind::Logistic:
            check_vector_dims(task, model, ex);
            return softplus(-ex.label * score_of(task, model, ex));
        case TaskKind::Svm: {
            check_vector_dims(task, model, ex);
            const double margin = 1.0 - ex.label * score_of(task, model, ex);
            return margin > 0.0 ? margin : 0.0;
        }
        case TaskKind::Lmf: {
            check_cell_dims(task, model, ex);
            const double e = simd::dot(model.lrow(ex.row), model.rrow(ex.col), task.rank) -
                             ex.label;
            double term = e * e;
            if (task.mu > 0.0) {
                term += task.mu / task.row_cells[ex.row] *
                        simd::sum_sq(model.lrow(ex.row), task.rank);
                term += task.mu / task.col_cells[ex.col] *
                        simd::sum_sq(model.rrow(ex.col), task.rank);
            }
            return term;
        }
        case TaskKind::Portfolio: {
            const std::uint32_t d = task.dim;
            const double* w = model.coef.data();
            double quad = 0.0;
            for (std::uint32_t i = 0; i < d; ++i) {
                quad += w[i] * simd::dot(task.covariance.data() + static_cast<std::size_t>(i) * d,
                                         w, d);
            }
            return simd::dot(task.returns.data(), w, d) + quad;
        }
    }
    return 0.0;
}

double penalty(const TaskSpec& task, const Model& model) {
    if (task.task == TaskKind::Lmf) return 0.0;  // distributed into the cell terms
    const double* w = model.coef.data();
    const std::size_t d = model.coef.size();
    switch (task.reg) {
        case RegKind::None:
            return 0.0;
        case RegKind::L1:
            return task.mu * simd::sum_abs(w, d);
        case RegKind::L2Squared:
            return task.mu * simd::sum_sq(w, d);
        case RegKind::NonNegative:
            for (std::size_t i = 0; i < d; ++i) {
                if (w[i] < -1e-12) return std::numeric_limits<double>::infinity();
            }
            return 0.0;
        case RegKind::Simplex: {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                if (w[i] < -1e-12) return std::numeric_limits<double>::infinity();
                s += w[i];
            }
            if (std::fabs(s - 1.0) > 1e-9) return std::numeric_limits<double>::infinity();
            return 0.0;
        }
    }
    return 0.0;
}

Prediction predict(const TaskSpec& task, const Model& model, const ExampleView& ex) {
    if (task.task == TaskKind::Portfolio) {
        throw DataError("the portfolio task has no prediction semantics");
    }
    Prediction p;
    if (task.task == TaskKind::Lmf) {
        check_cell_dims(task, model, ex);
        p.score = simd::dot(model.lrow(ex.row), model.rrow(ex.col), task.rank);
        return p;
    }
    check_vector_dims(task, model, ex);
    p.score = score_of(task, model, ex);
    p.label = p.score >= 0.0 ? 1 : -1;
    return p;
}

}  // namespace bismarck
