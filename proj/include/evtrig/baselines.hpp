#pragma once

#include "evtrig/estimator.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace evtrig {

/// Time-triggered comparison estimators in their standard textbook forms.
/// These approximate the cited methods; only the tuning parameters are
/// reproduced, not every detail of the original algorithms.
enum class BaselineKind {
    /// x_i += beta(t) sum_j a_ij (x~_j - x_i) + alpha(t) K H_i^T (y_i - H_i x_i)
    consensus_innovations,
    /// adapt-then-combine: psi_i = x_i + mu(t) H_i^T (y_i - H_i x_i);
    /// x_i = c_ii psi_i + sum_j c_ij psi~_j with c_ij = 1/(|N_i| + 1)
    diffusion_lms,
    /// x_i += b(t) [H_i^T (y_i - H_i x_i) + sum_j a_ij (x~_j - x_i)]
    zhang,
};

const char* to_string(BaselineKind kind) noexcept;
BaselineKind baseline_kind_from_string(const std::string& name);

struct BaselineConfig {
    BaselineKind kind = BaselineKind::zhang;
    /// Communication happens on rounds with t mod period == 0; neighbors use
    /// the latest received values in between.
    std::int64_t period = 1;
    /// alpha(t) for consensus_innovations, mu(t) for diffusion_lms, b(t) for zhang.
    Schedule gain = Schedule::power(1.0, 100.0, 0.7);
    /// beta(t), consensus_innovations only.
    Schedule consensus_gain = Schedule::power(0.1, 1.0, 0.7);
    /// K; defaults to (sum_i H_i^T H_i)^-1 (pseudo-inverse when singular).
    std::optional<Eigen::MatrixXd> innovation_gain;
};

/// (sum_i E[H_i^T H_i])^-1 from the model's nominal regressors. `singular` is
/// set when the pseudo-inverse had to be used.
Eigen::MatrixXd default_innovation_gain(const ObservationModel& model, bool* singular = nullptr);

struct BaselineState {
    std::int64_t time = 0;
    std::vector<Eigen::VectorXd> estimates;
    /// received[i][k]: latest value from the k-th parent of sensor i.
    std::vector<std::vector<Eigen::VectorXd>> received;
    std::vector<std::vector<std::size_t>> parents;
    Eigen::MatrixXd innovation_gain;

    static BaselineState initial(const BaselineConfig& cfg, const SensorGraph& g,
                                 const ObservationModel& model,
                                 const std::vector<Eigen::VectorXd>& x0);
};

/// One synchronous round of the chosen baseline. Returns true when the round
/// was a communication round (every sensor sent to all its children).
bool baseline_step(const BaselineConfig& cfg, BaselineState& state, const SensorGraph& g,
                   const ObservationModel& model, const TrueParameter& theta, std::int64_t t,
                   std::vector<SensorStreams>& streams, double divergence_bound = 1e12);

RunTrace run_baseline(const BaselineConfig& cfg, const SensorGraph& g,
                      const ObservationModel& model, const TrueParameter& theta,
                      const std::vector<Eigen::VectorXd>& x0, std::int64_t horizon,
                      std::uint64_t seed, const EstimatorOptions& options = {});

}  // namespace evtrig
