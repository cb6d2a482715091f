#pragma once

#include "evtrig/baselines.hpp"
#include "evtrig/estimator.hpp"
#include "evtrig/graph.hpp"
#include "evtrig/schedule.hpp"
#include "evtrig/sensing.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evtrig {

struct GraphSpec {
    enum class Kind { edges, random_geometric };
    Kind kind = Kind::edges;
    std::size_t nodes = 0;
    std::vector<Edge> edges;  // 0-based here, 1-based in JSON
    double radius = 0.0;
    std::uint64_t seed = 0;
};

struct ObservationType {
    Eigen::MatrixXd matrix;
    double observe_probability = 1.0;  // < 1 makes the regressor intermittent
};

struct ObservationSpec {
    std::map<std::string, ObservationType> types;
    /// Type name per sensor.
    std::vector<std::string> assignment;
    /// Set when the config used the run-length form [[name, count], ...];
    /// kept so serialization reproduces it.
    std::vector<std::pair<std::string, std::size_t>> assignment_counts;
};

struct NoiseSpec {
    enum class Kind { gaussian, student_t };
    Kind kind = Kind::gaussian;
    std::vector<double> stddev;  // per sensor
    double dof = 0.0;
};

struct AlgorithmSpec {
    enum class Kind { event_triggered, baseline };
    Kind kind = Kind::event_triggered;
    std::string label;
    Delivery delivery = Delivery::same_round;
    BaselineKind baseline = BaselineKind::zhang;
    /// 0 means "matched": round(1 / mean lambda_c(T)) of the event-triggered run.
    std::int64_t period = 1;
    Schedule gain;
    std::optional<Schedule> consensus_gain;
    std::optional<Eigen::MatrixXd> innovation_gain;

    bool matched_period() const noexcept { return kind == Kind::baseline && period == 0; }
    std::string display_name() const;
    BaselineConfig baseline_config(std::int64_t resolved_period) const;

    static AlgorithmSpec event_triggered(Delivery delivery = Delivery::same_round);
    /// Baseline with the default gains for its kind.
    static AlgorithmSpec make_baseline(BaselineKind kind, std::int64_t period);
};

struct ExperimentConfig {
    std::string name;
    GraphSpec graph;
    Eigen::VectorXd theta;
    ObservationSpec observation;
    NoiseSpec noise;

    std::vector<Schedule> alpha;      // per sensor
    std::vector<Schedule> threshold;  // per sensor
    std::optional<Schedule> reference_alpha;
    double delta = 0.1;
    double rho = 4.0;
    std::optional<double> epsilon0;

    std::vector<Eigen::VectorXd> initial;  // per sensor
    std::int64_t horizon = 1;
    std::size_t runs = 1;
    std::uint64_t seed = 0;
    std::int64_t snapshot_stride = 0;
    double divergence_bound = 1e12;

    AlgorithmSpec algorithm;
    std::vector<AlgorithmSpec> compare_with;
    std::string output_dir;

    std::size_t nodes() const noexcept { return graph.nodes; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(theta.size()); }
};

/// Parse and validate; every problem is reported as ConfigError with the
/// offending field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Cross-field checks (dimensions, counts, schedule domains). parse_config
/// calls this; call it again after editing a config in code.
void validate(const ExperimentConfig& cfg);

nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j, const std::string& field);

SensorGraph build_graph(const ExperimentConfig& cfg);
ObservationModel build_model(const ExperimentConfig& cfg);
Schedules build_schedules(const ExperimentConfig& cfg);
EstimatorOptions build_options(const ExperimentConfig& cfg);

}  // namespace evtrig
