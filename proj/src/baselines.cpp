#include "evtrig/baselines.hpp"

#include "evtrig/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <iostream>

namespace evtrig {

const char* to_string(BaselineKind kind) noexcept {
    switch (kind) {
        case BaselineKind::consensus_innovations:
            return "consensus_innovations";
        case BaselineKind::diffusion_lms:
            return "diffusion_lms";
        case BaselineKind::zhang:
            return "zhang";
    }
    return "?";
}

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "consensus_innovations" || name == "periodic-consensus-innovations") {
        return BaselineKind::consensus_innovations;
    }
    if (name == "diffusion_lms" || name == "diffusion-lms") return BaselineKind::diffusion_lms;
    if (name == "zhang" || name == "periodic-zhang") return BaselineKind::zhang;
    throw ArgumentError("unknown baseline kind '" + name + "'");
}

Eigen::MatrixXd default_innovation_gain(const ObservationModel& model, bool* singular) {
    const auto m = static_cast<Eigen::Index>(model.dim());
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& source = model.regressor(i);
        if (source.nominal().size() == 0) {
            throw ModelError("default innovation gain needs fixed or intermittent regressors; "
                             "give the gain explicitly for custom sources");
        }
        gram += source.probability() * source.nominal().transpose() * source.nominal();
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    const bool is_singular = cod.rank() < m;
    if (singular) *singular = is_singular;
    if (is_singular) {
        std::cerr << "warning: sum of H_i^T H_i is singular; using its pseudo-inverse\n";
    }
    return cod.pseudoInverse();
}

BaselineState BaselineState::initial(const BaselineConfig& cfg, const SensorGraph& g,
                                     const ObservationModel& model,
                                     const std::vector<Eigen::VectorXd>& x0) {
    if (cfg.period < 1) throw ArgumentError("baseline period must be >= 1");
    BaselineState state;
    state.estimates = x0;
    state.parents.resize(g.size());
    state.received.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        state.parents[i] = g.parents(i);
        state.received[i].assign(state.parents[i].size(), Eigen::VectorXd::Zero(x0[i].size()));
    }
    if (cfg.kind == BaselineKind::consensus_innovations) {
        state.innovation_gain =
            cfg.innovation_gain ? *cfg.innovation_gain : default_innovation_gain(model);
        const auto m = static_cast<Eigen::Index>(model.dim());
        if (state.innovation_gain.rows() != m || state.innovation_gain.cols() != m) {
            throw ModelError("innovation gain K must be M x M");
        }
    }
    return state;
}

bool baseline_step(const BaselineConfig& cfg, BaselineState& state, const SensorGraph& g,
                   const ObservationModel& model, const TrueParameter& theta, std::int64_t t,
                   std::vector<SensorStreams>& streams, double divergence_bound) {
    if (state.time != t) throw PreconditionError("baseline_step: state time mismatch");
    const std::size_t n = state.estimates.size();
    const bool communicate = t % cfg.period == 0;
    const double gain = step_size_at(cfg.gain, t);

    // Local innovation directions H_i^T (y_i - H_i x_i).
    std::vector<Eigen::VectorXd> innovation(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Measurement m = model.sample(theta, i, t, streams[i]);
        innovation[i] = m.h.transpose() * (m.y - m.h * state.estimates[i]);
    }

    auto refresh = [&](const std::vector<Eigen::VectorXd>& sent) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < state.parents[i].size(); ++k) {
                state.received[i][k] = sent[state.parents[i][k]];
            }
        }
    };

    switch (cfg.kind) {
        case BaselineKind::consensus_innovations:
        case BaselineKind::zhang: {
            if (communicate) refresh(state.estimates);
            const double consensus = cfg.kind == BaselineKind::zhang
                                         ? gain
                                         : step_size_at(cfg.consensus_gain, t);
            std::vector<Eigen::VectorXd> next(n);
            for (std::size_t i = 0; i < n; ++i) {
                Eigen::VectorXd disagreement = Eigen::VectorXd::Zero(state.estimates[i].size());
                for (std::size_t k = 0; k < state.parents[i].size(); ++k) {
                    disagreement += g.weight(i, state.parents[i][k]) *
                                    (state.received[i][k] - state.estimates[i]);
                }
                const Eigen::VectorXd local = cfg.kind == BaselineKind::zhang
                                                  ? innovation[i]
                                                  : (state.innovation_gain * innovation[i]).eval();
                next[i] = state.estimates[i] + consensus * disagreement + gain * local;
            }
            state.estimates = std::move(next);
            break;
        }
        case BaselineKind::diffusion_lms: {
            std::vector<Eigen::VectorXd> psi(n);
            for (std::size_t i = 0; i < n; ++i) psi[i] = state.estimates[i] + gain * innovation[i];
            if (communicate) refresh(psi);
            for (std::size_t i = 0; i < n; ++i) {
                const double c = 1.0 / static_cast<double>(state.parents[i].size() + 1);
                Eigen::VectorXd combined = c * psi[i];
                for (const auto& value : state.received[i]) combined += c * value;
                state.estimates[i] = std::move(combined);
            }
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) guard_divergence(state.estimates[i], divergence_bound, t, i);
    state.time = t + 1;
    return communicate;
}

RunTrace run_baseline(const BaselineConfig& cfg, const SensorGraph& g,
                      const ObservationModel& model, const TrueParameter& theta,
                      const std::vector<Eigen::VectorXd>& x0, std::int64_t horizon,
                      std::uint64_t seed, const EstimatorOptions& options) {
    validate_run_inputs(g, model, theta, x0, horizon);
    BaselineState state = BaselineState::initial(cfg, g, model, x0);
    auto streams = derive_streams(seed, g.size());

    RunTrace trace;
    trace.nodes = g.size();
    trace.dim = model.dim();
    trace.horizon = horizon;
    trace.theta = theta.value();
    trace.child_counts = g.child_counts();
    trace.send_times.resize(g.size());
    trace.squared_error.reserve(static_cast<std::size_t>(horizon) + 1);

    auto stacked = [&] {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(model.dim()));
        for (std::size_t i = 0; i < g.size(); ++i) {
            x.row(static_cast<Eigen::Index>(i)) = state.estimates[i].transpose();
        }
        return x;
    };
    auto record = [&](std::int64_t t) {
        const Eigen::MatrixXd x = stacked();
        trace.squared_error.push_back(squared_network_error(x, trace.theta));
        if (options.snapshot_stride > 0 && (t % options.snapshot_stride == 0 || t == horizon)) {
            trace.snapshot_times.push_back(t);
            trace.snapshots.push_back(x);
        }
        if (t == horizon) trace.final_estimates = x;
    };

    record(0);
    for (std::int64_t t = 0; t < horizon; ++t) {
        if (baseline_step(cfg, state, g, model, theta, t, streams, options.divergence_bound)) {
            for (auto& times : trace.send_times) times.push_back(t);
        }
        record(t + 1);
    }
    return trace;
}

}  // namespace evtrig
