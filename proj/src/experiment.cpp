#include "evtrig/experiment.hpp"

#include "evtrig/analysis.hpp"
#include "evtrig/baselines.hpp"
#include "evtrig/csv.hpp"
#include "evtrig/errors.hpp"
#include "evtrig/estimator.hpp"
#include "evtrig/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>
#include <tuple>

namespace evtrig {

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    return out;
}

std::vector<std::string> estimate_columns(std::size_t dim) {
    std::vector<std::string> cols;
    for (std::size_t k = 1; k <= dim; ++k) cols.push_back("x_" + std::to_string(k));
    return cols;
}

struct RunOutput {
    std::vector<double> squared_error;
    std::vector<double> rate;
    RunSummary summary;
    Eigen::MatrixXd final_estimates;
    RunTrace trace;
};

}  // namespace

std::uint64_t experiment_run_seed(const ExperimentConfig& cfg, std::size_t run) {
    return run_seed(cfg.seed, run);
}

RunTrace run_single(const ExperimentConfig& cfg, const AlgorithmSpec& algorithm, std::size_t run_index,
                    std::int64_t period) {
    const SensorGraph g = build_graph(cfg);
    const ObservationModel model = build_model(cfg);
    const TrueParameter theta(cfg.theta);
    EstimatorOptions options = build_options(cfg);
    const std::uint64_t seed = experiment_run_seed(cfg, run_index);
    try {
        if (algorithm.kind == AlgorithmSpec::Kind::event_triggered) {
            options.delivery = algorithm.delivery;
            return run(g, model, build_schedules(cfg), theta, cfg.initial, cfg.horizon, seed, options);
        }
        const std::int64_t p = period > 0 ? period : algorithm.period;
        if (p < 1) throw ArgumentError("matched baseline period was not resolved");
        return run_baseline(algorithm.baseline_config(p), g, model, theta, cfg.initial, cfg.horizon, seed,
                            options);
    } catch (const DivergenceError& e) {
        throw DivergenceError(e.time(), e.sensor(),
                              algorithm.display_name() + ", run " + std::to_string(run_index) + ": " + e.what());
    }
}

MonteCarloResult run_experiment(const ExperimentConfig& cfg, const AlgorithmSpec& algorithm,
                                const ExperimentOptions& options, std::int64_t period) {
    validate(cfg);
    const std::size_t runs = cfg.runs;
    std::vector<RunOutput> outputs(runs);
    std::vector<std::exception_ptr> errors(runs);

    auto work = [&](std::size_t r) {
        try {
            RunTrace trace = run_single(cfg, algorithm, r, period);
            RunOutput& out = outputs[r];
            out.squared_error = trace.squared_error;
            out.rate = communication_rate_series(trace);
            out.final_estimates = trace.final_estimates;
            out.summary.run = r;
            out.summary.seed = experiment_run_seed(cfg, r);
            out.summary.final_squared_error = trace.squared_error.back();
            out.summary.total_events = trace.total_events();
            out.summary.total_messages = trace.total_messages();
            out.summary.final_rate = out.rate.back();
            out.summary.max_trigger_slack = trace.max_trigger_slack;
            if (options.keep_traces) out.trace = std::move(trace);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, runs));
    if (workers == 1) {
        for (std::size_t r = 0; r < runs; ++r) work(r);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next++; r < runs; r = next++) work(r);
            });
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    // Aggregation in run order keeps results independent of scheduling.
    MonteCarloResult result;
    result.algorithm = algorithm.display_name();
    result.period = algorithm.kind == AlgorithmSpec::Kind::baseline ? (period > 0 ? period : algorithm.period) : 0;
    result.seed = cfg.seed;
    result.runs = runs;
    result.horizon = cfg.horizon;
    result.nodes = cfg.nodes();
    result.dim = cfg.dim();
    result.config_echo = to_json(cfg);

    const std::size_t len = static_cast<std::size_t>(cfg.horizon) + 1;
    result.mse.assign(len, 0.0);
    result.mean_rate.assign(len, 0.0);
    result.mean_final_estimates = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.nodes()),
                                                        static_cast<Eigen::Index>(cfg.dim()));
    for (auto& out : outputs) {
        for (std::size_t t = 0; t < len; ++t) {
            result.mse[t] += out.squared_error[t];
            result.mean_rate[t] += out.rate[t];
        }
        result.mean_final_estimates += out.final_estimates;
        result.summaries.push_back(out.summary);
        if (options.keep_traces) result.traces.push_back(std::move(out.trace));
    }
    const double scale = static_cast<double>(cfg.nodes()) * static_cast<double>(runs);
    for (auto& v : result.mse) v /= scale;
    for (auto& v : result.mean_rate) v /= static_cast<double>(runs);
    result.mean_rate[0] = std::numeric_limits<double>::quiet_NaN();
    result.mean_final_estimates /= static_cast<double>(runs);
    result.grand_mean_estimate = result.mean_final_estimates.colwise().mean().transpose();
    return result;
}

MonteCarloResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options) {
    if (cfg.algorithm.matched_period()) {
        auto all = run_comparison(cfg, options);
        return std::move(all.front());
    }
    return run_experiment(cfg, cfg.algorithm, options);
}

std::int64_t matched_period(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw RateError("cannot match a period to rate " + format_number(rate));
    return std::max<std::int64_t>(1, std::llround(1.0 / rate));
}

std::vector<MonteCarloResult> run_comparison(const ExperimentConfig& cfg, const ExperimentOptions& options) {
    std::vector<const AlgorithmSpec*> all{&cfg.algorithm};
    for (const auto& a : cfg.compare_with) all.push_back(&a);

    std::vector<MonteCarloResult> results(all.size());
    std::int64_t matched = 0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (all[k]->kind != AlgorithmSpec::Kind::event_triggered) continue;
        results[k] = run_experiment(cfg, *all[k], options);
        if (matched == 0) matched = matched_period(results[k].mean_rate.back());
    }
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (all[k]->kind != AlgorithmSpec::Kind::baseline) continue;
        results[k] = run_experiment(cfg, *all[k], options, all[k]->matched_period() ? matched : 0);
    }
    return results;
}

void write_aggregate_csv(const std::string& path, const MonteCarloResult& result) {
    auto out = open_output(path);
    CsvWriter csv(out, {"t", "mse", "lambda_c"});
    for (std::size_t t = 0; t < result.mse.size(); ++t) {
        csv.cell(static_cast<std::int64_t>(t)).cell(result.mse[t]).cell(result.mean_rate[t]).end_row();
    }
}

void write_runs_csv(const std::string& path, const MonteCarloResult& result) {
    auto out = open_output(path);
    CsvWriter csv(out, {"run", "seed", "final_squared_error", "total_events", "total_messages", "lambda_c_final"});
    for (const auto& s : result.summaries) {
        csv.cell(s.run).cell(std::to_string(s.seed)).cell(s.final_squared_error).cell(s.total_events)
            .cell(s.total_messages).cell(s.final_rate).end_row();
    }
}

void write_estimates_csv(const std::string& path, const MonteCarloResult& result) {
    auto out = open_output(path);
    std::vector<std::string> header{"sensor"};
    for (auto& c : estimate_columns(result.dim)) header.push_back(c);
    CsvWriter csv(out, header);
    const auto& x = result.mean_final_estimates;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        csv.cell(static_cast<std::int64_t>(i + 1));
        for (Eigen::Index k = 0; k < x.cols(); ++k) csv.cell(x(i, k));
        csv.end_row();
    }
    csv.cell(std::string("mean"));
    for (Eigen::Index k = 0; k < result.grand_mean_estimate.size(); ++k) csv.cell(result.grand_mean_estimate(k));
    csv.end_row();
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
    auto out = open_output(path);
    const auto rate = communication_rate_series(trace);
    CsvWriter csv(out, {"t", "squared_error", "lambda_c"});
    for (std::size_t t = 0; t < trace.squared_error.size(); ++t) {
        csv.cell(static_cast<std::int64_t>(t)).cell(trace.squared_error[t]).cell(rate[t]).end_row();
    }
}

void write_events_csv(const std::string& path, const RunTrace& trace) {
    std::vector<std::tuple<std::int64_t, std::size_t, std::size_t>> events;
    for (std::size_t i = 0; i < trace.send_times.size(); ++i) {
        for (std::size_t k = 0; k < trace.send_times[i].size(); ++k) {
            events.emplace_back(trace.send_times[i][k], i, k + 1);
        }
    }
    std::sort(events.begin(), events.end());
    auto out = open_output(path);
    CsvWriter csv(out, {"t", "sensor", "event"});
    for (const auto& [t, i, k] : events) csv.cell(t).cell(i + 1).cell(k).end_row();
}

void write_snapshots_csv(const std::string& path, const RunTrace& trace) {
    auto out = open_output(path);
    std::vector<std::string> header{"t", "sensor"};
    for (auto& c : estimate_columns(trace.dim)) header.push_back(c);
    CsvWriter csv(out, header);
    for (std::size_t s = 0; s < trace.snapshots.size(); ++s) {
        const auto& x = trace.snapshots[s];
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            csv.cell(trace.snapshot_times[s]).cell(static_cast<std::int64_t>(i + 1));
            for (Eigen::Index k = 0; k < x.cols(); ++k) csv.cell(x(i, k));
            csv.end_row();
        }
    }
}

void write_comparison_csv(const std::string& path, const std::vector<MonteCarloResult>& results) {
    if (results.empty()) throw ArgumentError("nothing to compare");
    std::vector<std::string> header{"t"};
    for (const auto& r : results) {
        header.push_back("mse_" + r.algorithm);
        header.push_back("lambda_c_" + r.algorithm);
    }
    auto out = open_output(path);
    CsvWriter csv(out, header);
    const std::size_t len = results.front().mse.size();
    for (const auto& r : results) {
        if (r.mse.size() != len) throw AggregationError("compared results differ in horizon");
    }
    for (std::size_t t = 0; t < len; ++t) {
        csv.cell(static_cast<std::int64_t>(t));
        for (const auto& r : results) csv.cell(r.mse[t]).cell(r.mean_rate[t]);
        csv.end_row();
    }
}

}  // namespace evtrig
