#include "evtrig/trace.hpp"

#include "evtrig/errors.hpp"

#include <algorithm>

namespace evtrig {

std::int64_t RunTrace::trigger_count(std::size_t sensor, std::int64_t t) const {
    if (sensor >= send_times.size()) throw ArgumentError("trigger_count: sensor out of range");
    const auto& times = send_times[sensor];
    return std::upper_bound(times.begin(), times.end(), t) - times.begin();
}

std::size_t RunTrace::total_events() const {
    std::size_t total = 0;
    for (const auto& times : send_times) total += times.size();
    return total;
}

std::size_t RunTrace::total_messages() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < send_times.size(); ++i) total += send_times[i].size() * child_counts[i];
    return total;
}

const Eigen::MatrixXd* RunTrace::snapshot_at(std::int64_t t) const {
    const auto it = std::lower_bound(snapshot_times.begin(), snapshot_times.end(), t);
    if (it == snapshot_times.end() || *it != t) return nullptr;
    return &snapshots[static_cast<std::size_t>(it - snapshot_times.begin())];
}

double squared_network_error(const Eigen::MatrixXd& estimates, const Eigen::VectorXd& theta) {
    return (estimates.rowwise() - theta.transpose()).squaredNorm();
}

}  // namespace evtrig
