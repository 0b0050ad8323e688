#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bismarck/igd.hpp"

namespace bismarck {

enum class SchemeKind : std::uint8_t {
    Sequential,
    ModelAveraging,  // shared-nothing partial aggregates, merged by averaging
    SharedLock,      // one global mutex around read-model + compute + write
    SharedAIG,       // per-component compare-and-exchange retry loops
    SharedNoLock     // unsynchronized component reads/writes; races expected
};

const char* scheme_name(SchemeKind k);
std::optional<SchemeKind> scheme_from_name(const std::string& name);

struct ExecutionScheme {
    SchemeKind kind = SchemeKind::Sequential;
    std::uint32_t workers = 1;

    void validate() const;  // Sequential forces workers == 1
};

// The model parameters as one flat array of atomics (L rows then R rows for
// factor models). NoLock uses relaxed loads/stores -- no ordering, lost
// updates allowed, exactly the hardware behavior of unsynchronized writes,
// without undefined behavior. AIG uses compare-and-exchange per component.
// Lock callers hold a global mutex and use the relaxed accessors.
class SharedModel {
public:
    explicit SharedModel(const Model& m);

    std::size_t param_count() const { return count_; }
    double load(std::size_t i) const { return params_[i].load(std::memory_order_relaxed); }
    void store(std::size_t i, double v) { params_[i].store(v, std::memory_order_relaxed); }
    std::atomic<double>& slot(std::size_t i) { return params_[i]; }

    Model snapshot() const;

    std::uint64_t steps() const { return steps_.load(std::memory_order_relaxed); }
    void add_steps(std::uint64_t n) { steps_.fetch_add(n, std::memory_order_relaxed); }

private:
    Model shape_;  // dimensions only; parameter payload lives in params_
    std::unique_ptr<std::atomic<double>[]> params_;
    std::size_t count_ = 0;
    std::atomic<std::uint64_t> steps_{0};
};

/// Contiguous segments with sizes differing by at most one, covering
/// [0, n) exactly once. Throws when p > n.
std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t n, std::uint32_t p);

/// One epoch of shared-nothing model averaging: each of p segments is folded
/// independently from the same starting model (each worker advancing a
/// private step counter rebased on the global one), then the partial states
/// are merged by examples-seen-weighted averaging. p == 1 is bit-identical
/// to run_epoch.
AggState run_epoch_averaging(const Dataset& data, const std::vector<std::uint32_t>* order,
                             const AggState& state, const TaskSpec& task,
                             const StepSizeSchedule& schedule, std::uint32_t p);

/// One epoch over the shared model: p workers stream disjoint segments and
/// apply updates under the given scheme's contract. Every example is
/// processed exactly once; all worker effects are visible on return.
/// Simplex-constrained tasks are rejected (the projection is not a
/// per-component update). One worker is bit-identical to run_epoch for
/// every scheme.
void run_epoch_shared(const Dataset& data, const std::vector<std::uint32_t>* order,
                      SharedModel& shared, const TaskSpec& task,
                      const StepSizeSchedule& schedule, SchemeKind scheme, std::uint32_t p);

/// A single gradient step against the shared model (used by the shared
/// epoch workers and by the MRS samplers). `scratch` holds the worker's
/// private copy of the touched components; `lock` is taken for SharedLock.
void shared_step(SharedModel& shared, const ExampleView& ex, const TaskSpec& task, double alpha,
                 SchemeKind scheme, std::mutex* lock, Model& scratch, GradientUpdate& buf);

}  // namespace bismarck
