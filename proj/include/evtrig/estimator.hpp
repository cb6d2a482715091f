#pragma once

#include "evtrig/graph.hpp"
#include "evtrig/schedule.hpp"
#include "evtrig/sensing.hpp"
#include "evtrig/trace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace evtrig {

/// When a broadcast fired at time t becomes visible to children.
enum class Delivery {
    same_round,  // consumed by the time-t update (default)
    next_round,  // consumed by the time-(t+1) update
};

struct EstimatorOptions {
    Delivery delivery = Delivery::same_round;
    double divergence_bound = 1e12;
    /// Record X(t) every `snapshot_stride` steps (and at the horizon); 0 disables.
    std::int64_t snapshot_stride = 0;
};

/// Step-size convention: the update executed at simulation time t uses
/// alpha_i(t + 1), so a run of T updates consumes alpha_i(1), ..., alpha_i(T).
/// Trigger checks at t >= 1 use f_i(t).
inline double step_size_at(const Schedule& alpha, std::int64_t t) {
    return alpha(static_cast<double>(t + 1));
}

struct MailboxEntry {
    std::size_t parent;
    double weight;          // a_{i,parent}
    Eigen::VectorXd value;  // x_parent(tau_k) as last delivered
};

struct SensorState {
    Eigen::VectorXd estimate;        // x_i(t)
    Eigen::VectorXd last_broadcast;  // x_i(tau_{k_i(t)})
    std::int64_t trigger_count = 0;  // K_i(t)
    std::vector<MailboxEntry> mailbox;
};

struct TriggerEvent {
    std::size_t sensor;
    std::int64_t time;
    Eigen::VectorXd estimate_sent;
};

/// Network-wide state of the event-triggered estimator at time `time`.
struct EstimatorState {
    std::int64_t time = 0;
    std::vector<SensorState> sensors;

    static EstimatorState initial(const SensorGraph& g, const std::vector<Eigen::VectorXd>& x0);

    std::size_t size() const noexcept { return sensors.size(); }
    /// N x M, row i = x_i(t).
    Eigen::MatrixXd estimates() const;

private:
    friend struct StepAccess;
    struct Pending {
        std::size_t child;
        std::size_t slot;
        Eigen::VectorXd value;
    };
    std::vector<Pending> pending_;  // next-round deliveries
};

/// ||x_i(t) - x_i(tau_{k_i(t-1)})|| > f (strict). Requires t >= 1.
bool trigger_check(const EstimatorState& state, std::size_t i, std::int64_t t, double f);

struct StepResult {
    std::vector<TriggerEvent> events;
    /// max_j ||x_j(tau) - x_j(t)|| - f_j(t) observed at this update (t >= 1).
    double max_trigger_slack;
};

/// One synchronous round at time t: all trigger phases (forced sends at t = 0),
/// then deliveries, then every sensor's measurement and update. Advances
/// `state` to t + 1.
StepResult network_step(EstimatorState& state, const SensorGraph& g, const ObservationModel& model,
                        const Schedules& s, const TrueParameter& theta, std::int64_t t,
                        std::vector<SensorStreams>& streams, const EstimatorOptions& options = {});

/// Iterates network_step for t = 0..horizon-1 with streams derived from `seed`.
RunTrace run(const SensorGraph& g, const ObservationModel& model, const Schedules& s,
             const TrueParameter& theta, const std::vector<Eigen::VectorXd>& x0,
             std::int64_t horizon, std::uint64_t seed, const EstimatorOptions& options = {});

/// Shared input validation for estimator and baselines.
void validate_run_inputs(const SensorGraph& g, const ObservationModel& model,
                         const TrueParameter& theta, const std::vector<Eigen::VectorXd>& x0,
                         std::int64_t horizon);

/// Throws DivergenceError when any entry is non-finite or beyond `bound`.
void guard_divergence(const Eigen::VectorXd& x, double bound, std::int64_t t, std::size_t sensor);

}  // namespace evtrig
