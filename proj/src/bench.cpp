#include "bismarck/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include "bismarck/datagen.hpp"
#include "bismarck/ordering.hpp"
#include "bismarck/runlog.hpp"
#include "bismarck/sampling.hpp"
#include "bismarck/simd/kernels.hpp"

namespace bismarck {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

void maybe_write_log(const std::string& dir, const std::string& name, const RunLog& log) {
    if (dir.empty()) return;
    write_runlog(dir + "/" + name, log);
}

void maybe_write_text(const std::string& dir, const std::string& name, const std::string& body) {
    if (dir.empty()) return;
    std::ofstream out(dir + "/" + name, std::ios::binary);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

RunLog log_of(const TrainResult& r,
              std::vector<std::pair<std::string, std::string>> config) {
    RunLog log;
    log.config = std::move(config);
    log.config.emplace_back("seed", std::to_string(r.seed));
    log.config.emplace_back("converged", r.converged ? "1" : "0");
    log.rows = r.history;
    return log;
}

/// Mean of three timed calls after one discarded warm-up.
template <typename F>
double mean_of_three(F&& body) {
    body();
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto t0 = Clock::now();
        body();
        total += seconds_since(t0);
    }
    return total / 3.0;
}

}  // namespace

double grid_search_alpha0(const std::vector<double>& grid,
                          const std::function<std::uint32_t(double)>& epochs_for) {
    double best = grid.front();
    std::uint32_t best_epochs = 0;
    for (double alpha0 : grid) {
        const std::uint32_t e = epochs_for(alpha0);
        if (e == 0) continue;  // did not converge
        if (best_epochs == 0 || e < best_epochs) {
            best = alpha0;
            best_epochs = e;
        }
    }
    if (best_epochs == 0) throw NumericError("grid search: no step size converged");
    return best;
}

CatxOutcome bench_catx(const BenchOptions& opt) {
    ensure_dir(opt.out_dir);
    const Dataset data = gen_catx(500);
    TaskSpec task;
    task.task = TaskKind::LeastSquares;
    task.dim = 1;
    constexpr std::uint32_t kCap = 400;
    // Octave grid around the unit step, skipping alpha0 = 1 itself: with the
    // 1/(k+1) rule that value turns the iterate into the exact running label
    // mean, which is 0 at every epoch end of this balanced dataset no matter
    // how it is ordered -- there is nothing to compare there.
    const std::vector<double> grid = {4.0, 2.0, 0.5, 0.25};

    auto epochs_to_small_w = [&](double alpha0, OrderKind kind,
                                 std::vector<EpochRow>* rows) -> std::uint32_t {
        StepSizeSchedule sched{ScheduleKind::DivergentSeries, alpha0, 0.95, 0};
        const OrderingStrategy ord{kind, opt.seed};
        AggState st = initialize(task);
        std::vector<std::uint32_t> perm;
        const std::vector<std::uint32_t>* order = nullptr;
        if (kind != OrderKind::Clustered) {
            perm = permute(ord, 0, data.size());
            order = &perm;
        }
        const auto t0 = Clock::now();
        for (std::uint32_t e = 1; e <= kCap; ++e) {
            run_epoch(data, order, st, task, sched);
            const double w = st.model.coef[0];
            if (rows) {
                rows->push_back({e, compute_loss(data, st.model, task), seconds_since(t0), 0.0,
                                 0.0});
            }
            if (w * w < 1e-3) return e;
        }
        return 0;
    };

    CatxOutcome out;
    for (double a : grid) {
        out.grid.push_back({a, epochs_to_small_w(a, OrderKind::ShuffleOnce, nullptr),
                            epochs_to_small_w(a, OrderKind::Clustered, nullptr)});
    }
    out.alpha0 = grid_search_alpha0(grid, [&](double a) {
        for (const auto& g : out.grid)
            if (g.alpha0 == a) return g.random_epochs;
        return 0u;
    });
    for (const auto& g : out.grid) {
        if (g.alpha0 == out.alpha0) {
            out.random_epochs = g.random_epochs;
            out.clustered_epochs = g.clustered_epochs;
        }
    }

    if (!opt.out_dir.empty()) {
        std::vector<EpochRow> rows;
        epochs_to_small_w(out.alpha0, OrderKind::ShuffleOnce, &rows);
        TrainResult r;
        r.history = rows;
        r.seed = opt.seed;
        maybe_write_log(opt.out_dir, "catx_random.csv",
                        log_of(r, {{"suite", "catx"},
                                   {"order", "shuffle-once"},
                                   {"alpha0", std::to_string(out.alpha0)}}));
        rows.clear();
        epochs_to_small_w(out.alpha0, OrderKind::Clustered, &rows);
        r.history = rows;
        maybe_write_log(opt.out_dir, "catx_clustered.csv",
                        log_of(r, {{"suite", "catx"},
                                   {"order", "clustered"},
                                   {"alpha0", std::to_string(out.alpha0)}}));
        std::string summary = "alpha0,random_epochs,clustered_epochs,selected\n";
        for (const auto& g : out.grid) {
            summary += std::to_string(g.alpha0) + "," + std::to_string(g.random_epochs) + "," +
                       std::to_string(g.clustered_epochs) + "," +
                       (g.alpha0 == out.alpha0 ? "1" : "0") + "\n";
        }
        maybe_write_text(opt.out_dir, "catx_summary.csv", summary);
    }
    return out;
}

OrderingOutcome bench_ordering(const BenchOptions& opt) {
    ensure_dir(opt.out_dir);
    ClassifySpec spec;
    spec.count = 50000;
    spec.dim = 2000;
    spec.nnz = 10;
    spec.flip_prob = 0.10;
    spec.seed = opt.seed;
    spec.clustered = true;
    const Dataset data = gen_sparse_classify(spec);

    TrainConfig cfg;
    cfg.task.task = TaskKind::Logistic;
    cfg.task.dim = spec.dim;
    cfg.schedule = {ScheduleKind::Constant, 0.05, 0.95, 0};
    cfg.policy = {PolicyKind::RelativeLossDrop, 40, 0.001, 1e-6};
    cfg.ordering = {OrderKind::ShuffleAlways, opt.seed};
    cfg.seed = opt.seed;
    cfg.physical_rewrite = true;

    const TrainResult always = train(data, cfg);
    OrderingOutcome out;
    out.always_epochs = always.epochs_run;
    out.always_total_s = always.history.back().cum_seconds;
    for (const auto& r : always.history) out.always_shuffle_s += r.shuffle_seconds;
    out.target_objective = always.history.back().objective;

    TrainConfig once_cfg = cfg;
    once_cfg.ordering.kind = OrderKind::ShuffleOnce;
    once_cfg.policy = {PolicyKind::FixedEpochs,
                       std::min<std::uint32_t>(4 * always.epochs_run + 8, 160), 0.001, 1e-6};
    once_cfg.target_objective = out.target_objective;
    const TrainResult once = train(data, once_cfg);
    out.once_epochs = once.epochs_run;
    out.once_total_s = once.history.back().cum_seconds;
    for (const auto& r : once.history) out.once_shuffle_s += r.shuffle_seconds;
    out.once_reached_target = once.history.back().objective <= out.target_objective;

    maybe_write_log(opt.out_dir, "ordering_shuffle_always.csv",
                    log_of(always, {{"suite", "ordering"},
                                    {"order", "shuffle-always"},
                                    {"physical_rewrite", "1"},
                                    {"mu", "0"}}));
    maybe_write_log(opt.out_dir, "ordering_shuffle_once.csv",
                    log_of(once, {{"suite", "ordering"},
                                  {"order", "shuffle-once"},
                                  {"physical_rewrite", "1"},
                                  {"mu", "0"}}));
    std::string summary =
        "order,epochs,total_seconds,shuffle_seconds,target_objective,reached\n";
    summary += "shuffle-always," + std::to_string(out.always_epochs) + "," +
               std::to_string(out.always_total_s) + "," + std::to_string(out.always_shuffle_s) +
               "," + std::to_string(out.target_objective) + ",1\n";
    summary += "shuffle-once," + std::to_string(out.once_epochs) + "," +
               std::to_string(out.once_total_s) + "," + std::to_string(out.once_shuffle_s) + "," +
               std::to_string(out.target_objective) + "," +
               (out.once_reached_target ? "1" : "0") + "\n";
    maybe_write_text(opt.out_dir, "ordering_summary.csv", summary);
    return out;
}

ParallelOutcome bench_parallel(const BenchOptions& opt) {
    ensure_dir(opt.out_dir);
    ClassifySpec spec;
    spec.count = 100000;
    spec.dim = 64;
    spec.flip_prob = 0.10;
    spec.seed = opt.seed;
    spec.clustered = false;
    const Dataset data = gen_dense_classify(spec);

    TaskSpec task;
    task.task = TaskKind::Logistic;
    task.dim = spec.dim;
    const StepSizeSchedule schedule{ScheduleKind::Constant, 0.01, 0.95, 0};

    ParallelOutcome out;
    out.hardware_threads = std::thread::hardware_concurrency();

    // Per-epoch gradient time, mean of three after a warm-up.
    out.sequential_epoch_seconds = mean_of_three([&] {
        AggState st = initialize(task);
        run_epoch(data, nullptr, st, task, schedule);
    });

    const std::vector<std::uint32_t> ladder = {1, 2, 4, 8};
    const std::vector<SchemeKind> shared_schemes = {SchemeKind::SharedLock, SchemeKind::SharedAIG,
                                                    SchemeKind::SharedNoLock};
    for (SchemeKind scheme : shared_schemes) {
        for (std::uint32_t w : ladder) {
            const double s = mean_of_three([&] {
                SharedModel shm(task.make_model());
                run_epoch_shared(data, nullptr, shm, task, schedule, scheme, w);
            });
            out.timings.push_back({scheme, w, s});
        }
    }
    for (std::uint32_t w : ladder) {
        const double s = mean_of_three([&] {
            AggState st = initialize(task);
            st = run_epoch_averaging(data, nullptr, st, task, schedule, w);
        });
        out.timings.push_back({SchemeKind::ModelAveraging, w, s});
    }

    // Convergence: sequential oracle first, then every scheme against it.
    TrainConfig oracle_cfg;
    oracle_cfg.task = task;
    oracle_cfg.schedule = schedule;
    oracle_cfg.policy = {PolicyKind::RelativeLossDrop, 60, 1e-5, 1e-6};
    oracle_cfg.ordering = {OrderKind::ShuffleOnce, opt.seed};
    oracle_cfg.seed = opt.seed;
    const TrainResult oracle = train(data, oracle_cfg);
    out.oracle_objective = oracle.history.back().objective;
    maybe_write_log(opt.out_dir, "parallel_oracle_seq.csv",
                    log_of(oracle, {{"suite", "parallel"}, {"scheme", "seq"}}));

    const double target = out.oracle_objective * 1.001;
    const std::vector<SchemeKind> all = {SchemeKind::ModelAveraging, SchemeKind::SharedLock,
                                         SchemeKind::SharedAIG, SchemeKind::SharedNoLock};
    for (SchemeKind scheme : all) {
        TrainConfig cfg = oracle_cfg;
        cfg.scheme = scheme;
        cfg.workers = opt.workers;
        cfg.policy = {PolicyKind::FixedEpochs, 60, 0.001, 1e-6};
        cfg.target_objective = target;
        const TrainResult r = train(data, cfg);
        const double final_obj = r.history.back().objective;
        out.objectives.push_back({scheme, final_obj, final_obj <= target});
        maybe_write_log(opt.out_dir, std::string("parallel_") + scheme_name(scheme) + ".csv",
                        log_of(r, {{"suite", "parallel"},
                                   {"scheme", scheme_name(scheme)},
                                   {"workers", std::to_string(opt.workers)}}));
    }

    std::string summary = "scheme,workers,epoch_seconds,speedup\n";
    summary += "seq,1," + std::to_string(out.sequential_epoch_seconds) + ",1\n";
    for (const auto& t : out.timings) {
        summary += std::string(scheme_name(t.scheme)) + "," + std::to_string(t.workers) + "," +
                   std::to_string(t.epoch_seconds) + "," +
                   std::to_string(out.sequential_epoch_seconds / t.epoch_seconds) + "\n";
    }
    maybe_write_text(opt.out_dir, "parallel_summary.csv", summary);
    return out;
}

MrsOutcome bench_mrs(const BenchOptions& opt) {
    ensure_dir(opt.out_dir);
    ClassifySpec spec;
    spec.count = 20000;
    spec.dim = 1000;
    spec.nnz = 10;
    spec.flip_prob = 0.15;
    spec.seed = opt.seed;
    spec.clustered = true;
    const Dataset data = gen_sparse_classify(spec);

    TaskSpec task;
    task.task = TaskKind::Logistic;
    task.dim = spec.dim;
    const StepSizeSchedule schedule{ScheduleKind::Constant, 0.05, 0.95, 0};
    const std::size_t buffer = spec.count / 10;

    MrsOutcome out;

    // Reference optimum from a long shuffled sequential run.
    TrainConfig oracle_cfg;
    oracle_cfg.task = task;
    oracle_cfg.schedule = schedule;
    oracle_cfg.policy = {PolicyKind::RelativeLossDrop, 200, 1e-5, 1e-6};
    oracle_cfg.ordering = {OrderKind::ShuffleOnce, opt.seed};
    oracle_cfg.seed = opt.seed;
    const TrainResult oracle = train(data, oracle_cfg);
    out.optimal_objective = oracle.history.back().objective;

    // Equal wall-time budget: whatever a fixed-pass MRS probe takes.
    const ConvergencePolicy run_policy{PolicyKind::FixedEpochs, 400, 0.001, 1e-6};
    {
        const ConvergencePolicy probe_policy{PolicyKind::FixedEpochs, 12, 0.001, 1e-6};
        const TrainResult probe =
            mrs_train(data, buffer, task, schedule, probe_policy, opt.seed);
        out.budget_s = probe.history.back().cum_seconds;
    }

    for (int i = 0; i < 5; ++i) {
        const std::uint64_t seed_i = opt.seed + 1000u * static_cast<std::uint64_t>(i + 1);
        const TrainResult mrs =
            mrs_train(data, buffer, task, schedule, run_policy, seed_i, out.budget_s);
        const TrainResult sub =
            subsample_train(data, buffer, task, schedule, run_policy, seed_i, out.budget_s);
        out.mrs_final.push_back(mrs.history.back().objective);
        out.subsample_final.push_back(sub.history.back().objective);
        if (i == 0) {
            maybe_write_log(opt.out_dir, "mrs_mrs_seed0.csv",
                            log_of(mrs, {{"suite", "mrs"},
                                         {"mode", "mrs"},
                                         {"buffer", std::to_string(buffer)}}));
            maybe_write_log(opt.out_dir, "mrs_subsample_seed0.csv",
                            log_of(sub, {{"suite", "mrs"},
                                         {"mode", "subsample"},
                                         {"buffer", std::to_string(buffer)}}));
        }
    }

    // Buffer ladder: wall time to reach twice the optimal objective.
    const double target = 2.0 * out.optimal_objective;
    out.ladder_buffers = {spec.count / 20, spec.count / 10, spec.count / 5};
    for (std::size_t b : out.ladder_buffers) {
        const TrainResult sub = subsample_train(data, b, task, schedule, run_policy, opt.seed,
                                                0.0, target);
        const TrainResult mrs =
            mrs_train(data, b, task, schedule, run_policy, opt.seed, 0.0, true, target);
        out.subsample_time_to_2x.push_back(
            sub.history.back().objective <= target ? sub.history.back().cum_seconds : -1.0);
        out.mrs_time_to_2x.push_back(
            mrs.history.back().objective <= target ? mrs.history.back().cum_seconds : -1.0);
    }

    std::string summary = "metric,buffer,subsample,mrs\n";
    for (std::size_t i = 0; i < out.mrs_final.size(); ++i) {
        summary += "final_objective_seed" + std::to_string(i) + "," + std::to_string(buffer) +
                   "," + std::to_string(out.subsample_final[i]) + "," +
                   std::to_string(out.mrs_final[i]) + "\n";
    }
    for (std::size_t i = 0; i < out.ladder_buffers.size(); ++i) {
        summary += "seconds_to_2x_optimal," + std::to_string(out.ladder_buffers[i]) + "," +
                   std::to_string(out.subsample_time_to_2x[i]) + "," +
                   std::to_string(out.mrs_time_to_2x[i]) + "\n";
    }
    maybe_write_text(opt.out_dir, "mrs_summary.csv", summary);
    return out;
}

OverheadOutcome bench_overhead(const BenchOptions& opt) {
    ensure_dir(opt.out_dir);
    ClassifySpec dense_spec;
    dense_spec.count = 20000;
    dense_spec.dim = 54;
    dense_spec.flip_prob = 0.1;
    dense_spec.seed = opt.seed;
    dense_spec.clustered = false;
    const Dataset dense = gen_dense_classify(dense_spec);

    ClassifySpec sparse_spec = dense_spec;
    sparse_spec.count = 16000;
    sparse_spec.dim = 41000;
    sparse_spec.nnz = 10;
    const Dataset sparse = gen_sparse_classify(sparse_spec);

    const Dataset matrix = gen_rank_one_matrix(240, 160, opt.seed);

    const StepSizeSchedule schedule{ScheduleKind::Constant, 0.01, 0.95, 0};
    OverheadOutcome out;

    auto measure = [&](const Dataset& data, const char* name, TaskKind kind) {
        TaskSpec task;
        task.task = kind;
        if (kind == TaskKind::Lmf) {
            task.rows = data.rows();
            task.cols = data.cols();
            task.rank = 10;
        } else {
            task.dim = data.dim();
        }
        const double task_s = mean_of_three([&] {
            AggState st = initialize(task, std::nullopt, opt.seed);
            run_epoch(data, nullptr, st, task, schedule);
        });
        double sink = 0.0;
        const double null_s = mean_of_three([&] { null_epoch(data, nullptr, sink); });
        out.rows.push_back({name, kind, task_s, null_s, task_s / null_s - 1.0});
    };

    measure(dense, "dense20k_d54", TaskKind::Logistic);
    measure(dense, "dense20k_d54", TaskKind::Svm);
    measure(sparse, "sparse16k_d41k", TaskKind::Logistic);
    measure(sparse, "sparse16k_d41k", TaskKind::Svm);
    measure(matrix, "matrix240x160", TaskKind::Lmf);

    std::string summary = "dataset,task,task_epoch_seconds,null_epoch_seconds,overhead\n";
    for (const auto& r : out.rows) {
        summary += r.dataset + "," + task_name(r.task) + "," + std::to_string(r.task_epoch_s) +
                   "," + std::to_string(r.null_epoch_s) + "," + std::to_string(r.overhead) + "\n";
    }
    maybe_write_text(opt.out_dir, "overhead_summary.csv", summary);
    return out;
}

}  // namespace bismarck
