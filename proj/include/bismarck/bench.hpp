#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bismarck/train.hpp"

namespace bismarck {

// Benchmark suites. The CLI `bench` subcommand and the acceptance suite both
// run these; each writes per-run CSV logs and a summary CSV under out_dir
// (skipped when out_dir is empty) and returns the measured numbers.
//
// Timing protocol: every per-epoch timing point is the mean of three runs
// after one discarded warm-up.

struct BenchOptions {
    std::string out_dir;
    std::uint64_t seed = 42;
    std::uint32_t workers = 4;
};

// Data-ordering pathology on the 1-D clustered dataset (n = 500). A small
// grid search over the divergent-series alpha0 picks the step size that
// converges fastest under the shuffled ordering (ties to the larger alpha0);
// both orderings then run to w^2 < 0.001, hard cap 400 epochs (0 = no
// convergence).
struct CatxGridPoint {
    double alpha0;
    std::uint32_t random_epochs;
    std::uint32_t clustered_epochs;
};
struct CatxOutcome {
    double alpha0 = 0.0;
    std::uint32_t random_epochs = 0;
    std::uint32_t clustered_epochs = 0;
    std::vector<CatxGridPoint> grid;
};
CatxOutcome bench_catx(const BenchOptions& opt);

// Shuffle-once vs shuffle-always with physical rewrites on a 50k-tuple
// sparse LR dataset. The always run trains to the 0.1% relative-drop
// tolerance; its final objective becomes the common target the once run
// must reach.
struct OrderingOutcome {
    std::uint32_t always_epochs = 0;
    std::uint32_t once_epochs = 0;
    bool once_reached_target = false;
    double always_total_s = 0.0;
    double once_total_s = 0.0;
    double always_shuffle_s = 0.0;  // summed over epochs
    double once_shuffle_s = 0.0;
    double target_objective = 0.0;
};
OrderingOutcome bench_ordering(const BenchOptions& opt);

// Execution schemes on a dense LR task (100k x 64): per-epoch gradient time
// for workers in {1, 2, 4, 8} (capped at opt.workers for the convergence
// matrix), plus final objectives vs the sequential oracle.
struct SchemeTiming {
    SchemeKind scheme;
    std::uint32_t workers;
    double epoch_seconds;
};
struct SchemeObjective {
    SchemeKind scheme;
    double objective;
    bool reached;  // within 0.1% of the oracle
};
struct ParallelOutcome {
    double sequential_epoch_seconds = 0.0;
    std::vector<SchemeTiming> timings;
    double oracle_objective = 0.0;
    std::vector<SchemeObjective> objectives;  // at opt.workers
    std::uint32_t hardware_threads = 0;
};
ParallelOutcome bench_parallel(const BenchOptions& opt);

// Subsampling vs multiplexed reservoir sampling on clustered sparse LR.
// Equal wall-time budget per seed (the budget is the MRS probe run's wall
// time); a buffer ladder measures time to reach twice the optimal objective.
struct MrsOutcome {
    double optimal_objective = 0.0;
    double budget_s = 0.0;
    std::vector<double> subsample_final;  // one per seed
    std::vector<double> mrs_final;
    std::vector<std::size_t> ladder_buffers;
    std::vector<double> subsample_time_to_2x;  // seconds; <0 = not reached
    std::vector<double> mrs_time_to_2x;
};
MrsOutcome bench_mrs(const BenchOptions& opt);

// Per-tuple engine overhead against the NULL aggregate (no-op transition)
// on dense, sparse and matrix data.
struct OverheadRow {
    std::string dataset;
    TaskKind task;
    double task_epoch_s;
    double null_epoch_s;
    double overhead;  // task/null - 1
};
struct OverheadOutcome {
    std::vector<OverheadRow> rows;
};
OverheadOutcome bench_overhead(const BenchOptions& opt);

/// Picks the grid alpha0 whose run (via `epochs_for`, 0 = no convergence)
/// converges in the fewest epochs; ties keep the earlier (larger) entry.
double grid_search_alpha0(const std::vector<double>& grid,
                          const std::function<std::uint32_t(double)>& epochs_for);

}  // namespace bismarck
