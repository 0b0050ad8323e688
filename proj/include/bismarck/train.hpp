#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bismarck/igd.hpp"
#include "bismarck/ordering.hpp"
#include "bismarck/parallel.hpp"

namespace bismarck {

struct EpochRow {
    std::uint32_t epoch = 0;   // 1-based
    double objective = 0.0;
    double cum_seconds = 0.0;
    double epoch_seconds = 0.0;    // gradient pass only
    double shuffle_seconds = 0.0;  // reordering cost charged to this epoch
};

struct TrainResult {
    Model model;
    std::vector<EpochRow> history;
    std::uint32_t epochs_run = 0;
    bool converged = false;
    std::uint64_t seed = 0;
};

enum class TrainMode : std::uint8_t { Full, Subsample, Mrs };

const char* mode_name(TrainMode m);
std::optional<TrainMode> mode_from_name(const std::string& name);

struct TrainConfig {
    TaskSpec task;
    StepSizeSchedule schedule;
    ConvergencePolicy policy;
    OrderingStrategy ordering;
    SchemeKind scheme = SchemeKind::Sequential;
    std::uint32_t workers = 1;
    TrainMode mode = TrainMode::Full;
    std::size_t buffer = 0;          // reservoir capacity for subsample/mrs
    std::uint64_t seed = 0;
    bool physical_rewrite = false;   // materialize shuffles through the filesystem
    double time_budget_s = 0.0;      // 0 = unlimited; checked at epoch boundaries
    std::optional<double> target_objective;  // stop (converged) once reached
    std::optional<Model> init;

    void validate(const Dataset& data) const;
};

/// The outer loop: order data per strategy, run one epoch under the chosen
/// execution scheme, evaluate the objective over the full dataset, test the
/// convergence policy, repeat until it fires or max_epochs. Subsample/MRS
/// modes route to the sampling module.
TrainResult train(const Dataset& data, const TrainConfig& cfg);

}  // namespace bismarck
