#include "evtrig/estimator.hpp"

#include "evtrig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace evtrig {

struct StepAccess {
    static auto& pending(EstimatorState& s) { return s.pending_; }
};

EstimatorState EstimatorState::initial(const SensorGraph& g, const std::vector<Eigen::VectorXd>& x0) {
    if (x0.size() != g.size()) {
        throw ModelError("initial estimates given for " + std::to_string(x0.size()) +
                         " sensors, graph has " + std::to_string(g.size()));
    }
    EstimatorState state;
    state.sensors.resize(g.size());
    const Eigen::Index dim = x0.front().size();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (x0[i].size() != dim) throw ModelError("initial estimates differ in dimension");
        auto& s = state.sensors[i];
        s.estimate = x0[i];
        s.last_broadcast = x0[i];
        for (const std::size_t j : g.parents(i)) {
            s.mailbox.push_back({j, g.weight(i, j), Eigen::VectorXd::Zero(dim)});
        }
    }
    return state;
}

Eigen::MatrixXd EstimatorState::estimates() const {
    if (sensors.empty()) return {};
    Eigen::MatrixXd out(static_cast<Eigen::Index>(sensors.size()), sensors.front().estimate.size());
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = sensors[i].estimate.transpose();
    }
    return out;
}

bool trigger_check(const EstimatorState& state, std::size_t i, std::int64_t t, double f) {
    if (t < 1) throw PreconditionError("trigger_check: t = 0 is a forced send, not a check");
    const auto& s = state.sensors.at(i);
    return (s.estimate - s.last_broadcast).norm() > f;
}

void guard_divergence(const Eigen::VectorXd& x, double bound, std::int64_t t, std::size_t sensor) {
    if (x.allFinite() && x.cwiseAbs().maxCoeff() <= bound) return;
    std::ostringstream msg;
    msg << "numerical divergence at t=" << t << ", sensor " << sensor << ": estimate ["
        << x.transpose() << "]";
    throw DivergenceError(t, sensor, msg.str());
}

void validate_run_inputs(const SensorGraph& g, const ObservationModel& model,
                         const TrueParameter& theta, const std::vector<Eigen::VectorXd>& x0,
                         std::int64_t horizon) {
    if (horizon < 1) throw ArgumentError("horizon must be >= 1");
    if (model.size() != g.size()) {
        throw ModelError("observation model has " + std::to_string(model.size()) +
                         " sensors, graph has " + std::to_string(g.size()));
    }
    if (theta.dim() != model.dim()) throw ModelError("theta dimension does not match the model");
    if (x0.size() != g.size()) throw ModelError("one initial estimate per sensor required");
    for (const auto& x : x0) {
        if (static_cast<std::size_t>(x.size()) != model.dim()) {
            throw ModelError("initial estimate dimension does not match theta");
        }
    }
}

namespace {

// Copies the sender's broadcast into every child mailbox slot listening to it.
template <typename Sink>
void for_each_listener(const SensorGraph& g, const EstimatorState& state, std::size_t sender,
                       Sink&& sink) {
    for (const std::size_t child : g.children(sender)) {
        const auto& mailbox = state.sensors[child].mailbox;
        for (std::size_t slot = 0; slot < mailbox.size(); ++slot) {
            if (mailbox[slot].parent == sender) sink(child, slot);
        }
    }
}

}  // namespace

StepResult network_step(EstimatorState& state, const SensorGraph& g, const ObservationModel& model,
                        const Schedules& s, const TrueParameter& theta, std::int64_t t,
                        std::vector<SensorStreams>& streams, const EstimatorOptions& options) {
    if (state.time != t) {
        throw PreconditionError("network_step: state is at t=" + std::to_string(state.time) +
                                ", step requested at t=" + std::to_string(t));
    }
    const std::size_t n = state.size();
    if (streams.size() != n || s.alpha.size() != n || s.threshold.size() != n ||
        model.size() != n) {
        throw ModelError("network_step: sensor count mismatch between state, model, schedules and streams");
    }

    StepResult result;
    result.max_trigger_slack = -std::numeric_limits<double>::infinity();
    auto& pending = StepAccess::pending(state);

    // Deliveries held back from the previous round.
    for (auto& p : pending) state.sensors[p.child].mailbox[p.slot].value = std::move(p.value);
    pending.clear();

    // Trigger phase for every sensor before any update reads a mailbox.
    for (std::size_t i = 0; i < n; ++i) {
        auto& sensor = state.sensors[i];
        const bool fire =
            t == 0 || trigger_check(state, i, t, s.threshold[i](static_cast<double>(t)));
        if (!fire) continue;
        sensor.last_broadcast = sensor.estimate;
        ++sensor.trigger_count;
        result.events.push_back({i, t, sensor.estimate});
        const bool immediate = t == 0 || options.delivery == Delivery::same_round;
        for_each_listener(g, state, i, [&](std::size_t child, std::size_t slot) {
            if (immediate) {
                state.sensors[child].mailbox[slot].value = sensor.estimate;
            } else {
                pending.push_back({child, slot, sensor.estimate});
            }
        });
    }

    if (t >= 1) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& sj = state.sensors[j];
            const double slack = (sj.last_broadcast - sj.estimate).norm() -
                                 s.threshold[j](static_cast<double>(t));
            result.max_trigger_slack = std::max(result.max_trigger_slack, slack);
        }
    }

    // Measurement and update phase.
    for (std::size_t i = 0; i < n; ++i) {
        auto& sensor = state.sensors[i];
        const Measurement m = model.sample(theta, i, t, streams[i]);
        const double alpha = step_size_at(s.alpha[i], t);

        Eigen::VectorXd correction = m.h.transpose() * (m.y - m.h * sensor.estimate);
        for (const auto& entry : sensor.mailbox) {
            correction += entry.weight * (entry.value - sensor.estimate);
        }
        sensor.estimate += alpha * correction;
        guard_divergence(sensor.estimate, options.divergence_bound, t, i);
    }
    state.time = t + 1;
    return result;
}

RunTrace run(const SensorGraph& g, const ObservationModel& model, const Schedules& s,
             const TrueParameter& theta, const std::vector<Eigen::VectorXd>& x0,
             std::int64_t horizon, std::uint64_t seed, const EstimatorOptions& options) {
    validate_run_inputs(g, model, theta, x0, horizon);
    if (s.alpha.size() != g.size() || s.threshold.size() != g.size()) {
        throw ScheduleError("schedules must be declared for every sensor");
    }

    EstimatorState state = EstimatorState::initial(g, x0);
    auto streams = derive_streams(seed, g.size());

    RunTrace trace;
    trace.nodes = g.size();
    trace.dim = model.dim();
    trace.horizon = horizon;
    trace.theta = theta.value();
    trace.child_counts = g.child_counts();
    trace.send_times.resize(g.size());
    trace.squared_error.reserve(static_cast<std::size_t>(horizon) + 1);

    auto record = [&](std::int64_t t) {
        const Eigen::MatrixXd x = state.estimates();
        trace.squared_error.push_back(squared_network_error(x, trace.theta));
        const bool snap = options.snapshot_stride > 0 &&
                          (t % options.snapshot_stride == 0 || t == horizon);
        if (snap) {
            trace.snapshot_times.push_back(t);
            trace.snapshots.push_back(x);
        }
        if (t == horizon) trace.final_estimates = x;
    };

    record(0);
    for (std::int64_t t = 0; t < horizon; ++t) {
        StepResult step = network_step(state, g, model, s, theta, t, streams, options);
        for (const auto& e : step.events) trace.send_times[e.sensor].push_back(e.time);
        trace.max_trigger_slack = std::max(trace.max_trigger_slack, step.max_trigger_slack);
        record(t + 1);
    }
    return trace;
}

}  // namespace evtrig
