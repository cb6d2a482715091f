#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace evtrig {

/// Everything one simulated run leaves behind.
///
/// Events (sends) are recorded at full resolution as per-sensor time lists;
/// estimate snapshots are optional and subsampled. `squared_error[t]` is
/// ||X(t) - 1 (x) theta||^2 for t = 0..horizon.
struct RunTrace {
    std::size_t nodes = 0;
    std::size_t dim = 0;
    std::int64_t horizon = 0;
    Eigen::VectorXd theta;
    std::vector<std::size_t> child_counts;  // |N_i^c|

    std::vector<double> squared_error;
    std::vector<std::vector<std::int64_t>> send_times;  // ascending, per sensor

    std::vector<std::int64_t> snapshot_times;
    std::vector<Eigen::MatrixXd> snapshots;  // N x M, row i = x_i(t)
    Eigen::MatrixXd final_estimates;         // N x M at t = horizon

    /// max over updates and sensors of ||x_j(tau) - x_j(t)|| - f_j(t); <= 0 when the
    /// trigger bound holds. -inf when no update was checked.
    double max_trigger_slack = -std::numeric_limits<double>::infinity();

    /// K_i(t): sends of sensor i in [0, t].
    std::int64_t trigger_count(std::size_t sensor, std::int64_t t) const;
    std::size_t total_events() const;
    /// sum_i K_i * |N_i^c| over the whole run.
    std::size_t total_messages() const;
    /// Snapshot at exactly time t, or nullptr when not recorded.
    const Eigen::MatrixXd* snapshot_at(std::int64_t t) const;
};

/// ||X - 1 (x) theta||^2 for an N x M estimate matrix.
double squared_network_error(const Eigen::MatrixXd& estimates, const Eigen::VectorXd& theta);

}  // namespace evtrig
