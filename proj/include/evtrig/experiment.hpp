#pragma once

#include "evtrig/config.hpp"
#include "evtrig/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace evtrig {

struct RunSummary {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double final_squared_error = 0.0;
    std::size_t total_events = 0;
    std::size_t total_messages = 0;
    double final_rate = 0.0;  // lambda_c(T)
    double max_trigger_slack = 0.0;
};

struct MonteCarloResult {
    std::string algorithm;
    std::int64_t period = 0;  // resolved communication period; 0 for event-triggered
    std::uint64_t seed = 0;
    std::size_t runs = 0;
    std::int64_t horizon = 0;
    std::size_t nodes = 0;
    std::size_t dim = 0;

    std::vector<double> mse;        // t = 0..T
    std::vector<double> mean_rate;  // t = 0..T, index 0 NaN
    std::vector<RunSummary> summaries;
    Eigen::MatrixXd mean_final_estimates;  // N x M, per sensor, averaged over runs
    Eigen::VectorXd grand_mean_estimate;   // averaged over sensors and runs
    nlohmann::json config_echo;

    /// Per-run traces, kept only when requested.
    std::vector<RunTrace> traces;
};

struct ExperimentOptions {
    std::size_t workers = 1;
    bool keep_traces = false;
};

/// run_seed(master, run): a stable hash, so adding runs never changes earlier ones.
std::uint64_t experiment_run_seed(const ExperimentConfig& cfg, std::size_t run);

/// One run of `algorithm` (resolved period for baselines) on run index `run`.
RunTrace run_single(const ExperimentConfig& cfg, const AlgorithmSpec& algorithm, std::size_t run,
                    std::int64_t period = 0);

/// Monte Carlo over cfg.runs runs of one algorithm. Results do not depend on
/// the worker count. A matched baseline period must be resolved by the caller.
MonteCarloResult run_experiment(const ExperimentConfig& cfg, const AlgorithmSpec& algorithm,
                                const ExperimentOptions& options = {}, std::int64_t period = 0);

/// cfg.algorithm only.
MonteCarloResult run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& options = {});

/// cfg.algorithm followed by cfg.compare_with. Event-triggered algorithms run
/// first so "matched" baselines can use round(1 / mean lambda_c(T)) of the
/// first of them. Results come back in config order.
std::vector<MonteCarloResult> run_comparison(const ExperimentConfig& cfg,
                                             const ExperimentOptions& options = {});

/// round(1 / rate), at least 1.
std::int64_t matched_period(double rate);

// CSV export. Sensors are 1-based in every file.

/// t,mse,lambda_c
void write_aggregate_csv(const std::string& path, const MonteCarloResult& result);
/// run,seed,final_squared_error,total_events,total_messages,lambda_c_final
void write_runs_csv(const std::string& path, const MonteCarloResult& result);
/// sensor,x_1..x_M; per-sensor means over runs, then a "mean" row over sensors.
void write_estimates_csv(const std::string& path, const MonteCarloResult& result);
/// t,squared_error,lambda_c for one trace.
void write_trace_csv(const std::string& path, const RunTrace& trace);
/// t,sensor,event where event is the sensor's running send count K_i(t).
void write_events_csv(const std::string& path, const RunTrace& trace);
/// t,sensor,x_1..x_M
void write_snapshots_csv(const std::string& path, const RunTrace& trace);
/// t, then mse_<name> and lambda_c_<name> per result.
void write_comparison_csv(const std::string& path, const std::vector<MonteCarloResult>& results);

}  // namespace evtrig
