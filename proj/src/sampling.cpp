#include "bismarck/sampling.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "bismarck/parallel.hpp"

namespace bismarck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

TrainResult subsample_train(const Dataset& data, std::size_t buffer, const TaskSpec& task,
                            const StepSizeSchedule& schedule, const ConvergencePolicy& policy,
                            std::uint64_t seed, double time_budget_s,
                            std::optional<double> target_objective) {
    task.validate();
    schedule.validate();
    policy.validate();
    if (data.empty()) throw DataError("dataset is empty");

    const auto t0 = Clock::now();

    // One sampling pass over the stored order.
    Rng rng(mix_seed(seed, kSubsampleRngStream));
    Reservoir<std::uint32_t> res(buffer);
    for (std::size_t i = 0; i < data.size(); ++i) {
        res.offer(static_cast<std::uint32_t>(i), rng);
    }

    Dataset sample(data.format());
    if (data.format() == DataFormat::MatrixTriples) {
        sample.declare_shape(data.rows(), data.cols());
    } else {
        sample.declare_dim(data.dim());
    }
    for (std::uint32_t idx : res.slots()) sample.append(data.owned(idx));
    sample.finalize();

    TaskSpec sample_task = task;
    if (task.task == TaskKind::Lmf && task.mu > 0.0) {
        // The distributed penalty divisors must describe the cells actually
        // trained on.
        sample_task.row_cells = sample.row_cells();
        sample_task.col_cells = sample.col_cells();
    }

    AggState state = initialize(task, std::nullopt, seed);
    TrainResult result;
    result.seed = seed;
    std::vector<double> losses;
    for (std::uint32_t epoch = 1; epoch <= policy.max_epochs; ++epoch) {
        const auto e0 = Clock::now();
        if (!sample.empty()) run_epoch(sample, nullptr, state, sample_task, schedule);
        const double epoch_s = seconds_since(e0);
        const double objective = compute_loss(data, state.model, task);
        state.running_loss = objective;
        losses.push_back(objective);
        result.history.push_back({epoch, objective, seconds_since(t0), epoch_s, 0.0});
        result.epochs_run = epoch;
        if (target_objective && objective <= *target_objective) {
            result.converged = true;
            break;
        }
        if (converged(losses, policy)) {
            result.converged = true;
            break;
        }
        if (time_budget_s > 0.0 && seconds_since(t0) >= time_budget_s) break;
    }
    result.model = state.model;
    return result;
}

namespace {

// Poll states for the Memory worker's common signal integer.
enum MemSignal : int { kPause = 0, kRun = 1, kExit = 2 };

struct MemoryWorker {
    SharedModel& shared;
    const Dataset& data;
    const TaskSpec& task;
    StepSizeSchedule schedule;
    std::atomic<int>& signal;
    std::atomic<bool>& parked;
    const std::vector<std::uint32_t>* buffer = nullptr;  // read while running

    void operator()() {
        Model scratch = shared.snapshot();
        GradientUpdate buf;
        std::uint64_t k = 0;  // private counter, same schedule
        for (;;) {
            int s = signal.load(std::memory_order_acquire);
            if (s == kExit) break;
            if (s != kRun) {
                parked.store(true, std::memory_order_release);
                std::this_thread::yield();
                continue;
            }
            parked.store(false, std::memory_order_release);
            const auto& items = *buffer;
            if (items.empty()) {
                std::this_thread::yield();
                continue;
            }
            for (std::uint32_t idx : items) {
                if (signal.load(std::memory_order_relaxed) != kRun) break;
                const double alpha = step_size(schedule, k++);
                shared_step(shared, data.view(idx), task, alpha, SchemeKind::SharedNoLock,
                            nullptr, scratch, buf);
            }
        }
        parked.store(true, std::memory_order_release);
    }
};

}  // namespace

TrainResult mrs_train(const Dataset& data, std::size_t buffer, const TaskSpec& task,
                      const StepSizeSchedule& schedule, const ConvergencePolicy& policy,
                      std::uint64_t seed, double time_budget_s, bool memory_worker,
                      std::optional<double> target_objective) {
    task.validate();
    schedule.validate();
    policy.validate();
    if (data.empty()) throw DataError("dataset is empty");
    if (!task.separable_reg()) {
        throw DataError("MRS updates the model under the NoLock contract; "
                        "simplex-constrained tasks are not supported");
    }

    const auto t0 = Clock::now();

    AggState init_state = initialize(task, std::nullopt, seed);
    SharedModel shared(init_state.model);

    Reservoir<std::uint32_t> buf_a(buffer), buf_b(buffer);
    Reservoir<std::uint32_t>* fill = &buf_a;   // I/O worker samples into this
    Reservoir<std::uint32_t>* serve = &buf_b;  // Memory worker loops over this

    std::atomic<int> signal{kPause};
    std::atomic<bool> parked{true};
    MemoryWorker mem{shared, data, task, schedule, signal, parked, nullptr};
    std::thread mem_thread;
    if (memory_worker) mem_thread = std::thread(std::ref(mem));

    auto pause_memory = [&] {
        if (!memory_worker) return;
        signal.store(kPause, std::memory_order_release);
        while (!parked.load(std::memory_order_acquire)) std::this_thread::yield();
    };
    auto resume_memory = [&] {
        if (!memory_worker || serve->slots().empty()) return;
        mem.buffer = &serve->slots();
        signal.store(kRun, std::memory_order_release);
    };

    Rng rng(mix_seed(seed, kMrsRngStream));
    Model io_scratch = shared.snapshot();
    GradientUpdate io_buf;
    std::uint64_t io_k = 0;

    TrainResult result;
    result.seed = seed;
    std::vector<double> losses;
    try {
        for (std::uint32_t pass = 1; pass <= policy.max_epochs; ++pass) {
            const auto e0 = Clock::now();
            for (std::size_t i = 0; i < data.size(); ++i) {
                const auto dropped = fill->offer(static_cast<std::uint32_t>(i), rng);
                if (dropped) {
                    const double alpha = step_size(schedule, io_k++);
                    shared_step(shared, data.view(*dropped), task, alpha,
                                SchemeKind::SharedNoLock, nullptr, io_scratch, io_buf);
                }
            }
            const double epoch_s = seconds_since(e0);

            pause_memory();
            const double objective = compute_loss(data, shared.snapshot(), task);
            losses.push_back(objective);
            result.history.push_back({pass, objective, seconds_since(t0), epoch_s, 0.0});
            result.epochs_run = pass;
            if (target_objective && objective <= *target_objective) {
                result.converged = true;
                break;
            }
            if (converged(losses, policy)) {
                result.converged = true;
                break;
            }
            if (time_budget_s > 0.0 && seconds_since(t0) >= time_budget_s) break;

            // Swap roles: the just-filled buffer feeds the Memory worker,
            // the stale one is resampled from scratch on the next pass.
            std::swap(fill, serve);
            fill->reset();
            resume_memory();
        }
    } catch (...) {
        if (memory_worker) {
            signal.store(kExit, std::memory_order_release);
            mem_thread.join();
        }
        throw;
    }

    if (memory_worker) {
        signal.store(kExit, std::memory_order_release);
        mem_thread.join();
    }
    result.model = shared.snapshot();
    return result;
}

}  // namespace bismarck
