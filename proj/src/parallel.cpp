#include "bismarck/parallel.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "bismarck/prox.hpp"
#include "bismarck/simd/kernels.hpp"

namespace bismarck {

const char* scheme_name(SchemeKind k) {
    switch (k) {
        case SchemeKind::Sequential: return "seq";
        case SchemeKind::ModelAveraging: return "avg";
        case SchemeKind::SharedLock: return "lock";
        case SchemeKind::SharedAIG: return "aig";
        case SchemeKind::SharedNoLock: return "nolock";
    }
    return "?";
}

std::optional<SchemeKind> scheme_from_name(const std::string& name) {
    if (name == "seq") return SchemeKind::Sequential;
    if (name == "avg") return SchemeKind::ModelAveraging;
    if (name == "lock") return SchemeKind::SharedLock;
    if (name == "aig") return SchemeKind::SharedAIG;
    if (name == "nolock") return SchemeKind::SharedNoLock;
    return std::nullopt;
}

void ExecutionScheme::validate() const {
    if (workers == 0) throw DataError("workers must be >= 1");
    if (kind == SchemeKind::Sequential && workers != 1) {
        throw DataError("the sequential scheme runs with exactly one worker");
    }
}

SharedModel::SharedModel(const Model& m) {
    shape_ = m;
    count_ = m.param_count();
    params_ = std::make_unique<std::atomic<double>[]>(count_);
    for (std::size_t i = 0; i < count_; ++i) {
        params_[i].store(*m.params(i), std::memory_order_relaxed);
    }
    // Keep only the skeleton; the payload of shape_ is dead weight otherwise.
    for (double& v : shape_.coef) v = 0.0;
    for (double& v : shape_.lfac) v = 0.0;
    for (double& v : shape_.rfac) v = 0.0;
}

Model SharedModel::snapshot() const {
    Model out = shape_;
    for (std::size_t i = 0; i < count_; ++i) {
        *out.params(i) = params_[i].load(std::memory_order_relaxed);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t n, std::uint32_t p) {
    if (p == 0) throw DataError("cannot partition into zero segments");
    if (p > n) {
        throw DataError("more segments (" + std::to_string(p) + ") than examples (" +
                        std::to_string(n) + ")");
    }
    std::vector<std::pair<std::size_t, std::size_t>> segs;
    segs.reserve(p);
    const std::size_t base = n / p, rem = n % p;
    std::size_t begin = 0;
    for (std::uint32_t s = 0; s < p; ++s) {
        const std::size_t len = base + (s < rem ? 1 : 0);
        segs.emplace_back(begin, begin + len);
        begin += len;
    }
    return segs;
}

AggState run_epoch_averaging(const Dataset& data, const std::vector<std::uint32_t>* order,
                             const AggState& state, const TaskSpec& task,
                             const StepSizeSchedule& schedule, std::uint32_t p) {
    const auto segs = partition(data.size(), p);
    const StepSizeSchedule worker_schedule = schedule.shifted(state.step_count);

    std::vector<AggState> partials(p);
    auto fold_segment = [&](std::uint32_t s) {
        AggState st;
        st.model = state.model;  // broadcast of the epoch's starting model
        for (std::size_t pos = segs[s].first; pos < segs[s].second; ++pos) {
            const std::size_t src = order ? (*order)[pos] : pos;
            transition(st, data.view(src), task, worker_schedule);
        }
        partials[s] = std::move(st);
    };

    if (p == 1) {
        fold_segment(0);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(p);
        threads.reserve(p);
        for (std::uint32_t s = 0; s < p; ++s) {
            threads.emplace_back([&, s] {
                try {
                    fold_segment(s);
                } catch (...) {
                    errors[s] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    AggState combined = std::move(partials[0]);
    for (std::uint32_t s = 1; s < p; ++s) combined = merge(combined, partials[s]);

    AggState out;
    out.model = std::move(combined.model);
    out.step_count = state.step_count + combined.step_count;
    out.examples_seen = state.examples_seen + combined.examples_seen;
    out.running_loss = state.running_loss;
    return out;
}

namespace {

// Copies the components the gradient will read from the shared array into
// the worker's private scratch model.
void load_touched(const SharedModel& shared, const ExampleView& ex, const TaskSpec& task,
                  Model& scratch) {
    switch (ex.kind) {
        case ExampleKind::Dense:
            for (std::size_t i = 0; i < scratch.coef.size(); ++i) {
                scratch.coef[i] = shared.load(i);
            }
            break;
        case ExampleKind::Sparse:
            for (std::uint32_t idx : ex.indices) scratch.coef[idx] = shared.load(idx);
            break;
        case ExampleKind::MatrixCell: {
            const std::size_t lo = scratch.lrow_offset(ex.row);
            const std::size_t ro = scratch.rrow_offset(ex.col);
            double* l = scratch.lrow(ex.row);
            double* r = scratch.rrow(ex.col);
            for (std::uint32_t t = 0; t < task.rank; ++t) {
                l[t] = shared.load(lo + t);
                r[t] = shared.load(ro + t);
            }
            break;
        }
    }
}

void apply_nolock(SharedModel& shared, double c, const GradientUpdate& u, RegKind reg, double mu,
                  double alpha) {
    for (const GradientUpdate::Run& r : u.runs) {
        for (std::uint32_t t = 0; t < r.len; ++t) {
            const std::size_t i = r.param_start + t;
            const double moved = shared.load(i) + c * u.delta[r.delta_start + t];
            shared.store(i, prox_component(reg, mu, alpha, moved));
        }
    }
    const std::size_t scatter_base = u.delta.size() - u.index.size();
    for (std::size_t t = 0; t < u.index.size(); ++t) {
        const std::size_t i = u.index[t];
        const double moved = shared.load(i) + c * u.delta[scatter_base + t];
        shared.store(i, prox_component(reg, mu, alpha, moved));
    }
}

void cas_component(std::atomic<double>& slot, double c, double delta, RegKind reg, double mu,
                   double alpha) {
    double expected = slot.load(std::memory_order_relaxed);
    double desired = prox_component(reg, mu, alpha, expected + c * delta);
    while (!slot.compare_exchange_weak(expected, desired, std::memory_order_relaxed,
                                       std::memory_order_relaxed)) {
        desired = prox_component(reg, mu, alpha, expected + c * delta);
    }
}

void apply_aig(SharedModel& shared, double c, const GradientUpdate& u, RegKind reg, double mu,
               double alpha) {
    for (const GradientUpdate::Run& r : u.runs) {
        for (std::uint32_t t = 0; t < r.len; ++t) {
            cas_component(shared.slot(r.param_start + t), c, u.delta[r.delta_start + t], reg, mu,
                          alpha);
        }
    }
    const std::size_t scatter_base = u.delta.size() - u.index.size();
    for (std::size_t t = 0; t < u.index.size(); ++t) {
        cas_component(shared.slot(u.index[t]), c, u.delta[scatter_base + t], reg, mu, alpha);
    }
}

void step_body(SharedModel& shared, const ExampleView& ex, const TaskSpec& task, double alpha,
               SchemeKind scheme, Model& scratch, GradientUpdate& buf) {
    load_touched(shared, ex, task, scratch);
    grad(task, scratch, ex, buf);
    if (!buf.finite()) throw NumericError("non-finite gradient in shared-memory worker");
    const RegKind reg = task.prox_reg();
    if (scheme == SchemeKind::SharedAIG) {
        apply_aig(shared, -alpha, buf, reg, task.mu, alpha);
    } else {
        apply_nolock(shared, -alpha, buf, reg, task.mu, alpha);
    }
}

}  // namespace

void shared_step(SharedModel& shared, const ExampleView& ex, const TaskSpec& task, double alpha,
                 SchemeKind scheme, std::mutex* lock, Model& scratch, GradientUpdate& buf) {
    if (scheme == SchemeKind::SharedLock) {
        std::lock_guard<std::mutex> guard(*lock);
        step_body(shared, ex, task, alpha, scheme, scratch, buf);
    } else {
        step_body(shared, ex, task, alpha, scheme, scratch, buf);
    }
}

void run_epoch_shared(const Dataset& data, const std::vector<std::uint32_t>* order,
                      SharedModel& shared, const TaskSpec& task,
                      const StepSizeSchedule& schedule, SchemeKind scheme, std::uint32_t p) {
    if (scheme != SchemeKind::SharedLock && scheme != SchemeKind::SharedAIG &&
        scheme != SchemeKind::SharedNoLock) {
        throw DataError("run_epoch_shared needs a shared-memory scheme");
    }
    if (!task.separable_reg()) {
        throw DataError("simplex-constrained tasks cannot use shared-memory schemes");
    }
    const auto segs = partition(data.size(), p);
    const StepSizeSchedule worker_schedule = schedule.shifted(shared.steps());
    std::mutex lock;

    auto worker = [&](std::uint32_t s) {
        Model scratch = shared.snapshot();  // right shape; contents refreshed per step
        GradientUpdate buf;
        std::uint64_t k = 0;
        for (std::size_t pos = segs[s].first; pos < segs[s].second; ++pos) {
            const std::size_t src = order ? (*order)[pos] : pos;
            const double alpha = step_size(worker_schedule, k++);
            shared_step(shared, data.view(src), task, alpha, scheme, &lock, scratch, buf);
        }
        shared.add_steps(k);
    };

    if (p == 1) {
        worker(0);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(p);
    threads.reserve(p);
    for (std::uint32_t s = 0; s < p; ++s) {
        threads.emplace_back([&, s] {
            try {
                worker(s);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace bismarck
