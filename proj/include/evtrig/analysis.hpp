#pragma once

#include "evtrig/graph.hpp"
#include "evtrig/sensing.hpp"
#include "evtrig/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evtrig {

/// Raw edge-weighted send ratio sum_i K_i(t)|N_i^c| / (t sum_i |N_i^c|), with
/// K_i counted over [0, t] including the forced send at t = 0. It can exceed 1
/// by the t = 0 send.
double communication_rate_raw(const RunTrace& trace, std::int64_t t);

/// Communication rate lambda_c(t) = min(raw, 1), so the time-triggered limit
/// reads exactly 1. Requires 1 <= t <= horizon and at least one edge.
double communication_rate(const RunTrace& trace, std::int64_t t);

/// lambda_c(t) for t = 0..horizon; index 0 holds NaN.
std::vector<double> communication_rate_series(const RunTrace& trace);

/// (1/(N M0)) sum_runs sum_sensors ||x_i^j(t) - theta||^2.
double mse(std::span<const RunTrace> traces, std::int64_t t);
std::vector<double> mse_series(std::span<const RunTrace> traces);

struct GramianReport {
    std::size_t window_length = 1;
    std::size_t windows = 1;
    std::size_t samples = 1;
    double lambda_tilde = 1e-8;

    /// Per window: lambda_min of sum_t E[sum_j H_j^T H_j] (M x M).
    std::vector<double> observability_min_eigen;
    /// Per window: lambda_min of sum_t E[Lbar (x) I_M + D_H D_H^T] (NM x NM).
    std::vector<double> network_min_eigen;
    Eigen::MatrixXd first_observability_gramian;
    Eigen::MatrixXd first_network_gramian;

    bool balanced = false;
    bool spanning_tree = false;

    double min_observability() const;
    double min_network() const;
    bool collectively_observable() const { return min_observability() >= lambda_tilde; }
    /// Balanced digraph with a spanning tree and a collectively observable model.
    bool proposition_applies() const { return collectively_observable() && balanced && spanning_tree; }

    std::string to_text() const;
    std::string to_key_values(const std::string& prefix) const;
};

/// Windowed Gramians of the observability and network-observability
/// conditions. Conditional expectations of stochastic regressors are sample
/// means over `samples` independent regressor realizations; deterministic
/// models use a single exact pass.
GramianReport gramian_check(const SensorGraph& g, const ObservationModel& model,
                            std::size_t window_length, std::size_t windows, std::size_t samples,
                            double lambda_tilde = 1e-8, std::uint64_t seed = 0);

struct RateFit {
    std::int64_t t1 = 0;
    std::int64_t t2 = 0;
    double exponent = 0.0;
    double log_intercept = 0.0;
    double residual_rms = 0.0;
};

/// Least-squares slope of log(value) against log(t) over integer t in [t1, t2];
/// `series[t]` is the value at time t.
RateFit fit_decay(std::span<const double> series, std::int64_t t1, std::int64_t t2);

}  // namespace evtrig
