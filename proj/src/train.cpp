#include "bismarck/train.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <filesystem>

#include "bismarck/sampling.hpp"

namespace bismarck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ORDER BY RANDOM()-style reordering: serialize the permuted dataset through
// the filesystem and parse it back, so the shuffle pays real I/O instead of
// an index indirection.
Dataset materialize_permuted(const Dataset& data, const std::vector<std::uint32_t>& perm,
                             bool classification) {
    namespace fs = std::filesystem;
    const Dataset permuted = data.permuted(perm);
    static std::atomic<std::uint64_t> counter{0};
    const fs::path path =
        fs::temp_directory_path() /
        ("bismarck-shuffle-" + std::to_string(::getpid()) + "-" +
         std::to_string(counter.fetch_add(1)) + ".tmp");
    permuted.write_file(path.string());
    Dataset reread = load_dataset(path.string(), data.format(), classification);
    fs::remove(path);
    return reread;
}

}  // namespace

const char* mode_name(TrainMode m) {
    switch (m) {
        case TrainMode::Full: return "full";
        case TrainMode::Subsample: return "subsample";
        case TrainMode::Mrs: return "mrs";
    }
    return "?";
}

std::optional<TrainMode> mode_from_name(const std::string& name) {
    if (name == "full") return TrainMode::Full;
    if (name == "subsample") return TrainMode::Subsample;
    if (name == "mrs") return TrainMode::Mrs;
    return std::nullopt;
}

void TrainConfig::validate(const Dataset& data) const {
    task.validate();
    schedule.validate();
    policy.validate();
    ExecutionScheme{scheme, workers}.validate();
    if (data.empty()) throw DataError("dataset is empty");
    if (mode != TrainMode::Full && buffer == 0) {
        throw DataError("subsample/mrs modes need --buffer >= 1");
    }
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
    cfg.validate(data);

    if (cfg.mode == TrainMode::Subsample) {
        return subsample_train(data, cfg.buffer, cfg.task, cfg.schedule, cfg.policy, cfg.seed,
                               cfg.time_budget_s, cfg.target_objective);
    }
    if (cfg.mode == TrainMode::Mrs) {
        return mrs_train(data, cfg.buffer, cfg.task, cfg.schedule, cfg.policy, cfg.seed,
                         cfg.time_budget_s, true, cfg.target_objective);
    }

    const auto t0 = Clock::now();
    AggState state = initialize(cfg.task, cfg.init, cfg.seed);

    // Shared-memory schemes keep the model in one shared array across epochs.
    std::optional<SharedModel> shared;
    const bool is_shared = cfg.scheme == SchemeKind::SharedLock ||
                           cfg.scheme == SchemeKind::SharedAIG ||
                           cfg.scheme == SchemeKind::SharedNoLock;
    if (is_shared) shared.emplace(state.model);

    // Physical rewrite works on a materialized copy; index mode permutes views.
    const Dataset* current = &data;
    Dataset materialized(data.format());

    TrainResult result;
    result.seed = cfg.seed;
    std::vector<double> losses;

    for (std::uint32_t epoch = 1; epoch <= cfg.policy.max_epochs; ++epoch) {
        // Ordering for this epoch. ShuffleOnce reshuffles only before the
        // first epoch; in index mode the recomputed permutation is identical
        // across epochs by construction.
        double shuffle_s = 0.0;
        std::vector<std::uint32_t> perm;
        const std::vector<std::uint32_t>* order = nullptr;
        const bool reshuffle = cfg.ordering.kind == OrderKind::ShuffleAlways ||
                               (cfg.ordering.kind == OrderKind::ShuffleOnce && epoch == 1);
        if (cfg.ordering.kind != OrderKind::Clustered) {
            const auto s0 = Clock::now();
            if (cfg.physical_rewrite) {
                if (reshuffle) {
                    perm = permute(cfg.ordering, epoch - 1, current->size());
                    materialized =
                        materialize_permuted(*current, perm, cfg.task.classification());
                    current = &materialized;
                    perm.clear();
                    shuffle_s = seconds_since(s0);
                }
            } else {
                perm = permute(cfg.ordering, epoch - 1, current->size());
                order = &perm;
                if (reshuffle) shuffle_s = seconds_since(s0);
            }
        }

        // Gradient pass.
        const auto e0 = Clock::now();
        switch (cfg.scheme) {
            case SchemeKind::Sequential:
                run_epoch(*current, order, state, cfg.task, cfg.schedule);
                break;
            case SchemeKind::ModelAveraging:
                state = run_epoch_averaging(*current, order, state, cfg.task, cfg.schedule,
                                            cfg.workers);
                break;
            default:
                run_epoch_shared(*current, order, *shared, cfg.task, cfg.schedule, cfg.scheme,
                                 cfg.workers);
                break;
        }
        const double epoch_s = seconds_since(e0);

        if (is_shared) state.model = shared->snapshot();
        const Model& m = state.model;
        const double objective = compute_loss(*current, m, cfg.task);
        state.running_loss = objective;
        losses.push_back(objective);
        result.history.push_back({epoch, objective, seconds_since(t0), epoch_s, shuffle_s});
        result.epochs_run = epoch;

        if (cfg.target_objective && objective <= *cfg.target_objective) {
            result.converged = true;
            break;
        }
        std::optional<double> grad_norm;
        if (cfg.policy.kind == PolicyKind::GradientNorm) {
            grad_norm = full_gradient_norm(*current, m, cfg.task);
        }
        if (converged(losses, cfg.policy, grad_norm)) {
            result.converged = true;
            break;
        }
        if (cfg.time_budget_s > 0.0 && seconds_since(t0) >= cfg.time_budget_s) break;
    }

    result.model = is_shared ? shared->snapshot() : state.model;
    return result;
}

}  // namespace bismarck
