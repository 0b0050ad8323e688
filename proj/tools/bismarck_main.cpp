// bismarck CLI: train / predict / null-aggregate / bench.
//
// Exit codes: 0 success (train: converged), 1 usage or data error,
// 2 epoch cap reached without convergence.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bismarck/bench.hpp"
#include "bismarck/datagen.hpp"
#include "bismarck/model_io.hpp"
#include "bismarck/ordering.hpp"
#include "bismarck/runlog.hpp"
#include "bismarck/sampling.hpp"
#include "bismarck/train.hpp"

namespace {

using namespace bismarck;

struct TrainFlags {
    std::string task = "lr";
    std::string data;
    std::string model_out;
    std::string log_path;
    std::string order = "shuffle-once";
    std::string scheme = "seq";
    std::string mode = "full";
    std::string schedule = "divergent";
    std::string reg = "default";
    std::string format = "auto";
    double alpha0 = 0.5;
    double rho = 0.999;
    double mu = 0.0;
    std::uint32_t rank = 10;
    std::uint32_t epochs = 100;
    double tol = 0.001;
    std::uint64_t seed = 0;
    std::uint32_t workers = 0;  // 0 = hardware
    std::size_t buffer = 0;
    bool physical_rewrite = false;
    double budget = 0.0;
    double grad_tol = 1e-6;
    std::string policy = "rel-drop";
};

template <typename T>
T parse_or_fail(const std::optional<T>& v, const std::string& what, const std::string& got) {
    if (!v) throw DataError("unknown " + what + " '" + got + "'");
    return *v;
}

DataFormat resolve_format(const std::string& flag, const std::string& path, TaskKind task) {
    if (flag != "auto") {
        return parse_or_fail(format_from_name(flag), "format", flag);
    }
    if (task == TaskKind::Lmf) return DataFormat::MatrixTriples;
    if (const auto f = format_from_path(path)) return *f;
    return DataFormat::DenseCsv;
}

std::uint32_t resolve_workers(std::uint32_t flag_value) {
    if (const char* env = std::getenv("BISMARCK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::uint32_t>(v);
    }
    if (flag_value >= 1) return flag_value;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Portfolio input: dense CSV whose first data row is the expected-returns
// vector p and whose next d rows are the covariance matrix Sigma (the label
// column is ignored).
void load_portfolio(const std::string& path, TaskSpec& task) {
    const Dataset raw = load_dataset(path, DataFormat::DenseCsv, false);
    const std::uint32_t d = raw.dim();
    if (raw.size() != static_cast<std::size_t>(d) + 1) {
        throw DataError("portfolio file needs 1 + d rows (p, then Sigma)");
    }
    task.dim = d;
    const auto p = raw.view(0);
    task.returns.assign(p.values.begin(), p.values.end());
    task.covariance.resize(static_cast<std::size_t>(d) * d);
    for (std::uint32_t i = 0; i < d; ++i) {
        const auto row = raw.view(i + 1);
        std::copy(row.values.begin(), row.values.end(),
                  task.covariance.begin() + static_cast<std::size_t>(i) * d);
    }
}

TrainConfig build_config(const TrainFlags& f, Dataset& data) {
    TrainConfig cfg;
    cfg.task.task = parse_or_fail(task_from_name(f.task), "task", f.task);

    if (cfg.task.task == TaskKind::Portfolio) {
        load_portfolio(f.data, cfg.task);
        cfg.task.reg = RegKind::Simplex;
        // The one-term "sum": a single synthetic tuple drives the full step.
        data = Dataset(DataFormat::DenseCsv);
        Example e;
        e.kind = ExampleKind::Dense;
        e.values.assign(cfg.task.dim, 0.0);
        data.append(e);
        data.finalize();
    } else {
        const DataFormat fmt = resolve_format(f.format, f.data, cfg.task.task);
        data = load_dataset(f.data, fmt, cfg.task.classification());
        if (cfg.task.task == TaskKind::Lmf) {
            cfg.task.rows = data.rows();
            cfg.task.cols = data.cols();
            cfg.task.rank = f.rank;
            cfg.task.row_cells = data.row_cells();
            cfg.task.col_cells = data.col_cells();
            cfg.task.reg = f.mu > 0.0 ? RegKind::L2Squared : RegKind::None;
        } else {
            cfg.task.dim = data.dim();
            if (f.reg == "default") {
                cfg.task.reg = f.mu > 0.0 ? RegKind::L1 : RegKind::None;
            } else {
                cfg.task.reg = parse_or_fail(reg_from_name(f.reg), "regularizer", f.reg);
            }
        }
        cfg.task.mu = f.mu;
    }

    cfg.schedule.kind = parse_or_fail(schedule_from_name(f.schedule), "schedule", f.schedule);
    cfg.schedule.alpha0 = f.alpha0;
    cfg.schedule.rho = f.rho;

    if (f.policy == "rel-drop") {
        cfg.policy.kind = PolicyKind::RelativeLossDrop;
    } else if (f.policy == "fixed") {
        cfg.policy.kind = PolicyKind::FixedEpochs;
    } else if (f.policy == "grad-norm") {
        cfg.policy.kind = PolicyKind::GradientNorm;
    } else {
        throw DataError("unknown policy '" + f.policy + "'");
    }
    cfg.policy.max_epochs = f.epochs;
    cfg.policy.rel_tolerance = f.tol;
    cfg.policy.grad_norm_tolerance = f.grad_tol;

    cfg.ordering.kind = parse_or_fail(order_from_name(f.order), "ordering", f.order);
    cfg.ordering.seed = f.seed;
    cfg.scheme = parse_or_fail(scheme_from_name(f.scheme), "scheme", f.scheme);
    cfg.workers = cfg.scheme == SchemeKind::Sequential ? 1 : resolve_workers(f.workers);
    cfg.mode = parse_or_fail(mode_from_name(f.mode), "mode", f.mode);
    cfg.buffer = f.buffer;
    cfg.seed = f.seed;
    cfg.physical_rewrite = f.physical_rewrite;
    cfg.time_budget_s = f.budget;
    return cfg;
}

RunLog runlog_for(const TrainFlags& f, const TrainConfig& cfg, const TrainResult& r) {
    RunLog log;
    auto add = [&](const char* k, const std::string& v) { log.config.emplace_back(k, v); };
    add("task", f.task);
    add("data", f.data);
    add("format", f.format);
    add("order", f.order);
    add("scheme", f.scheme);
    add("mode", f.mode);
    add("schedule", f.schedule);
    char num[32];
    std::snprintf(num, sizeof num, "%.17g", f.alpha0);
    add("alpha0", num);
    std::snprintf(num, sizeof num, "%.17g", f.rho);
    add("rho", num);
    std::snprintf(num, sizeof num, "%.17g", f.mu);
    add("mu", num);
    add("reg", reg_name(cfg.task.reg));
    add("rank", std::to_string(f.rank));
    add("policy", f.policy);
    add("epochs", std::to_string(f.epochs));
    std::snprintf(num, sizeof num, "%.17g", f.tol);
    add("tol", num);
    add("seed", std::to_string(f.seed));
    add("workers", std::to_string(cfg.workers));
    add("buffer", std::to_string(f.buffer));
    add("physical_rewrite", f.physical_rewrite ? "1" : "0");
    add("converged", r.converged ? "1" : "0");
    add("epochs_run", std::to_string(r.epochs_run));
    log.rows = r.history;
    return log;
}

int cmd_train(const TrainFlags& f) {
    Dataset data(DataFormat::DenseCsv);
    const TrainConfig cfg = build_config(f, data);
    const TrainResult result = train(data, cfg);

    if (!f.model_out.empty()) {
        ModelMeta meta;
        meta.task = cfg.task.task;
        meta.seed = cfg.seed;
        meta.schedule = cfg.schedule;
        meta.reg = cfg.task.reg;
        meta.mu = cfg.task.mu;
        meta.epochs = result.epochs_run;
        save_model(result.model, meta, f.model_out);
    }
    if (!f.log_path.empty()) write_runlog(f.log_path, runlog_for(f, cfg, result));

    std::cout << "epochs=" << result.epochs_run << " converged=" << (result.converged ? 1 : 0)
              << " objective=" << result.history.back().objective
              << " seconds=" << result.history.back().cum_seconds << "\n";
    return result.converged ? 0 : 2;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, const std::string& format_flag) {
    const LoadedModel loaded = load_model(model_path);
    TaskSpec task;
    task.task = loaded.meta.task;
    if (loaded.model.kind == Model::Kind::Factors) {
        task.rows = loaded.model.rows;
        task.cols = loaded.model.cols;
        task.rank = loaded.model.rank;
    } else {
        task.dim = static_cast<std::uint32_t>(loaded.model.coef.size());
    }
    task.reg = loaded.meta.reg == RegKind::Simplex ? RegKind::Simplex : RegKind::None;

    const DataFormat fmt = resolve_format(format_flag, data_path, task.task);
    const Dataset data = load_dataset(data_path, fmt, false);

    std::ofstream out;
    if (!out_path.empty()) {
        out.open(out_path, std::ios::binary);
        if (!out) throw DataError("cannot open predictions file: " + out_path);
    }

    double sq_err = 0.0;
    std::size_t correct = 0;
    const bool classify = task.classification();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const ExampleView v = data.view(i);
        const Prediction p = predict(task, loaded.model, v);
        if (out.is_open()) {
            if (classify) {
                out << p.label << " " << p.score << "\n";
            } else {
                out << p.score << "\n";
            }
        }
        if (classify) {
            correct += (p.label > 0) == (v.label > 0) ? 1 : 0;
        } else {
            const double e = p.score - v.label;
            sq_err += e * e;
        }
    }
    if (classify) {
        std::cout << "examples=" << data.size()
                  << " accuracy=" << static_cast<double>(correct) / data.size() << "\n";
    } else {
        std::cout << "examples=" << data.size()
                  << " rmse=" << std::sqrt(sq_err / data.size()) << "\n";
    }
    return 0;
}

int cmd_null(const std::string& data_path, const std::string& format_flag,
             std::uint32_t epochs) {
    std::optional<DataFormat> fmt;
    if (format_flag != "auto") {
        fmt = format_from_name(format_flag);
    } else {
        fmt = format_from_path(data_path);
    }
    if (!fmt) throw DataError("cannot infer data format; pass --format");
    const Dataset data = load_dataset(data_path, *fmt, false);

    double sink = 0.0;
    null_epoch(data, nullptr, sink);  // warm-up
    double total = 0.0;
    using Clock = std::chrono::steady_clock;
    for (std::uint32_t e = 0; e < epochs; ++e) {
        const auto t0 = Clock::now();
        null_epoch(data, nullptr, sink);
        total += std::chrono::duration<double>(Clock::now() - t0).count();
    }
    std::cout << "tuples=" << data.size() << " epochs=" << epochs
              << " seconds_per_epoch=" << total / epochs
              << " ns_per_tuple=" << 1e9 * total / epochs / data.size() << "\n";
    return 0;
}

int cmd_bench(const std::string& suite, const BenchOptions& opt) {
    if (suite == "catx") {
        const CatxOutcome r = bench_catx(opt);
        std::cout << "selected alpha0=" << r.alpha0 << " random_epochs=" << r.random_epochs
                  << " clustered_epochs=" << r.clustered_epochs << "\n";
        return 0;
    }
    if (suite == "ordering") {
        const OrderingOutcome r = bench_ordering(opt);
        std::cout << "shuffle-always: epochs=" << r.always_epochs
                  << " total_s=" << r.always_total_s << " shuffle_s=" << r.always_shuffle_s
                  << "\n";
        std::cout << "shuffle-once:   epochs=" << r.once_epochs << " total_s=" << r.once_total_s
                  << " shuffle_s=" << r.once_shuffle_s
                  << " reached_target=" << (r.once_reached_target ? 1 : 0) << "\n";
        return 0;
    }
    if (suite == "parallel") {
        const ParallelOutcome r = bench_parallel(opt);
        std::cout << "sequential epoch_s=" << r.sequential_epoch_seconds
                  << " (hardware threads: " << r.hardware_threads << ")\n";
        for (const auto& t : r.timings) {
            std::cout << scheme_name(t.scheme) << " workers=" << t.workers
                      << " epoch_s=" << t.epoch_seconds
                      << " speedup=" << r.sequential_epoch_seconds / t.epoch_seconds << "\n";
        }
        std::cout << "oracle objective=" << r.oracle_objective << "\n";
        for (const auto& o : r.objectives) {
            std::cout << scheme_name(o.scheme) << " final=" << o.objective
                      << " within_0.1%=" << (o.reached ? 1 : 0) << "\n";
        }
        return 0;
    }
    if (suite == "mrs") {
        const MrsOutcome r = bench_mrs(opt);
        std::cout << "optimal=" << r.optimal_objective << " budget_s=" << r.budget_s << "\n";
        for (std::size_t i = 0; i < r.mrs_final.size(); ++i) {
            std::cout << "seed" << i << ": subsample=" << r.subsample_final[i]
                      << " mrs=" << r.mrs_final[i] << "\n";
        }
        for (std::size_t i = 0; i < r.ladder_buffers.size(); ++i) {
            std::cout << "B=" << r.ladder_buffers[i]
                      << " t2x_subsample=" << r.subsample_time_to_2x[i]
                      << " t2x_mrs=" << r.mrs_time_to_2x[i] << "\n";
        }
        return 0;
    }
    if (suite == "overhead") {
        const OverheadOutcome r = bench_overhead(opt);
        for (const auto& row : r.rows) {
            std::cout << row.dataset << " " << task_name(row.task)
                      << " task_s=" << row.task_epoch_s << " null_s=" << row.null_epoch_s
                      << " overhead=" << row.overhead << "\n";
        }
        return 0;
    }
    throw DataError("unknown bench suite '" + suite + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bismarck: incremental gradient descent analytics engine"};
    app.require_subcommand(1);

    TrainFlags tf;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model over a dataset");
    train_cmd->add_option("--task", tf.task, "ls|lr|svm|lmf|portfolio");
    train_cmd->add_option("--data", tf.data, "input data file")->required();
    train_cmd->add_option("--model-out", tf.model_out, "model file to write");
    train_cmd->add_option("--log", tf.log_path, "per-epoch CSV run log");
    train_cmd->add_option("--order", tf.order, "clustered|shuffle-once|shuffle-always");
    train_cmd->add_option("--scheme", tf.scheme, "seq|avg|lock|aig|nolock");
    train_cmd->add_option("--mode", tf.mode, "full|subsample|mrs");
    train_cmd->add_option("--schedule", tf.schedule, "constant|geometric|divergent");
    train_cmd->add_option("--alpha0", tf.alpha0, "initial step size");
    train_cmd->add_option("--rho", tf.rho, "geometric decay in (0,1)");
    train_cmd->add_option("--mu", tf.mu, "regularization strength");
    train_cmd->add_option("--reg", tf.reg, "none|l1|l2|nonneg (default: l1 when mu>0)");
    train_cmd->add_option("--rank", tf.rank, "LMF rank");
    train_cmd->add_option("--epochs", tf.epochs, "epoch cap");
    train_cmd->add_option("--tol", tf.tol, "relative loss-drop tolerance");
    train_cmd->add_option("--grad-tol", tf.grad_tol, "gradient-norm tolerance");
    train_cmd->add_option("--policy", tf.policy, "rel-drop|fixed|grad-norm");
    train_cmd->add_option("--seed", tf.seed, "PRNG seed");
    train_cmd->add_option("--workers", tf.workers, "parallel workers (0 = hardware)");
    train_cmd->add_option("--buffer", tf.buffer, "reservoir tuples for subsample/mrs");
    train_cmd->add_option("--format", tf.format, "auto|dense|sparse|matrix");
    train_cmd->add_flag("--physical-rewrite", tf.physical_rewrite,
                        "materialize shuffles through the filesystem");
    train_cmd->add_option("--budget", tf.budget, "wall-clock budget in seconds");

    std::string model_path, pred_data, pred_out, pred_format = "auto";
    CLI::App* predict_cmd = app.add_subcommand("predict", "apply a model to data");
    predict_cmd->add_option("--model", model_path)->required();
    predict_cmd->add_option("--data", pred_data)->required();
    predict_cmd->add_option("--out", pred_out, "predictions file (one per line)");
    predict_cmd->add_option("--format", pred_format, "auto|dense|sparse|matrix");

    std::string null_data, null_format = "auto";
    std::uint32_t null_epochs = 3;
    CLI::App* null_cmd =
        app.add_subcommand("null-aggregate", "time the no-op transition baseline");
    null_cmd->add_option("--data", null_data)->required();
    null_cmd->add_option("--format", null_format, "auto|dense|sparse|matrix");
    null_cmd->add_option("--epochs", null_epochs, "timed epochs");

    std::string suite;
    BenchOptions bench_opt;
    bench_opt.out_dir = "bench-out";
    std::uint32_t bench_workers = 0;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
    bench_cmd->add_option("suite", suite, "catx|ordering|parallel|mrs|overhead")->required();
    bench_cmd->add_option("--out", bench_opt.out_dir, "output directory for CSV logs");
    bench_cmd->add_option("--seed", bench_opt.seed);
    bench_cmd->add_option("--workers", bench_workers, "workers for the parallel matrix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) return cmd_train(tf);
        if (*predict_cmd) return cmd_predict(model_path, pred_data, pred_out, pred_format);
        if (*null_cmd) return cmd_null(null_data, null_format, null_epochs);
        if (*bench_cmd) {
            bench_opt.workers = resolve_workers(bench_workers);
            return cmd_bench(suite, bench_opt);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
