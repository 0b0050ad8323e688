#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bismarck/dataset.hpp"
#include "bismarck/model.hpp"
#include "bismarck/tasks.hpp"

namespace bismarck {

enum class ScheduleKind : std::uint8_t { Constant, Geometric, DivergentSeries };

const char* schedule_name(ScheduleKind k);
std::optional<ScheduleKind> schedule_from_name(const std::string& name);

// Step size as a function of the per-example step counter k. `k_offset`
// shifts the index: parallel workers each advance a private counter over
// their own segment, rebased onto the global count so one schedule spans
// the whole run (a global atomic counter would serialize the workers).
struct StepSizeSchedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double alpha0 = 0.1;
    double rho = 0.95;  // Geometric only, in (0,1)
    std::uint64_t k_offset = 0;

    void validate() const;
    StepSizeSchedule shifted(std::uint64_t by) const {
        StepSizeSchedule s = *this;
        s.k_offset += by;
        return s;
    }
};

/// alpha_k: Constant -> alpha0; Geometric -> alpha0*rho^k;
/// DivergentSeries -> alpha0/(k+1).
double step_size(const StepSizeSchedule& schedule, std::uint64_t k);

enum class PolicyKind : std::uint8_t { FixedEpochs, RelativeLossDrop, GradientNorm };

struct ConvergencePolicy {
    PolicyKind kind = PolicyKind::RelativeLossDrop;
    std::uint32_t max_epochs = 100;   // always a hard cap, every kind
    double rel_tolerance = 0.001;     // RelativeLossDrop
    double grad_norm_tolerance = 1e-6;  // GradientNorm

    void validate() const;
};

/// FixedEpochs: len(history) >= max_epochs. RelativeLossDrop:
/// |last-prev|/|prev| < tol (false with < 2 entries). GradientNorm:
/// grad_norm < tol (throws if grad_norm missing).
bool converged(const std::vector<double>& history, const ConvergencePolicy& policy,
               std::optional<double> grad_norm = std::nullopt);

// Aggregation context: the model plus step bookkeeping. A value type; it is
// copied or moved between execution contexts, never shared mutably.
struct AggState {
    Model model;
    std::uint64_t step_count = 0;     // k, advances once per transition
    std::uint64_t examples_seen = 0;
    double running_loss = 0.0;        // owned by the epoch driver
};

/// Zero model (vector tasks) or seeded uniform(-0.01, 0.01) factors (LMF;
/// all-zero factors are a stationary point of the objective). A provided
/// init model must match the task's dimensions.
AggState initialize(const TaskSpec& task, const std::optional<Model>& init = std::nullopt,
                    std::uint64_t seed = 0);

/// One IGD step: model <- prox_{alpha P}(model - alpha_k * grad_f_ex(model)),
/// alpha_k = step_size(schedule, state.step_count). Sparse examples and LMF
/// cells change only the touched components (separable penalties apply the
/// prox on the touched set). Throws NumericError on non-finite updates.
void transition(AggState& state, const ExampleView& ex, const TaskSpec& task,
                const StepSizeSchedule& schedule);

/// transition with an explicit step size (alpha = 0 is the identity).
void transition_alpha(AggState& state, const ExampleView& ex, const TaskSpec& task, double alpha);

/// Examples-seen-weighted model average; counts and losses sum. Merging with
/// a zero-examples state returns the other unchanged. Commutative.
AggState merge(const AggState& a, const AggState& b);

/// Returns the model unchanged.
const Model& terminate(const AggState& state);

/// model += c * update, then the separable prox on the touched components.
/// Exactly the arithmetic the shared-memory schemes apply per component.
void apply_update(Model& model, double c, const GradientUpdate& update, const TaskSpec& task,
                  double alpha);

/// Folds transition over data[order[i]] for i = 0..N-1 (identity order when
/// `order` is null). Deterministic for a fixed order.
void run_epoch(const Dataset& data, const std::vector<std::uint32_t>* order, AggState& state,
               const TaskSpec& task, const StepSizeSchedule& schedule);

/// Sum of per-example terms plus the penalty P (Eq. objective). Errors on a
/// non-finite result.
double compute_loss(const Dataset& data, const Model& model, const TaskSpec& task);

/// Full-batch objective gradient 2-norm (smooth tasks; used by the
/// GradientNorm policy). Includes the L2Squared penalty term.
double full_gradient_norm(const Dataset& data, const Model& model, const TaskSpec& task);

/// Streams every tuple through the same epoch machinery with a no-op
/// transition that reads the feature payload but updates nothing. This is
/// the overhead baseline's denominator.
void null_epoch(const Dataset& data, const std::vector<std::uint32_t>* order, double& sink);

}  // namespace bismarck
