#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace evtrig {

/// A step-size or threshold sequence as a pure function of time.
///
/// Power schedules evaluate scale * (t + offset)^(-exponent); constant
/// schedules return their value (possibly +inf for "never trigger"). Custom
/// schedules wrap an arbitrary callable and are opaque to the assumption
/// checkers, which then report trends only.
class Schedule {
public:
    enum class Kind { power, constant, custom };

    Schedule() : Schedule(constant(0.0)) {}

    static Schedule power(double scale, double offset, double exponent);
    static Schedule constant(double value);
    static Schedule custom(std::function<double(double)> fn, std::string label = "custom");

    double operator()(double t) const;

    Kind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }
    double offset() const noexcept { return offset_; }
    double exponent() const noexcept { return exponent_; }
    /// Constant value for constant schedules; scale for power schedules.
    double value() const noexcept { return scale_; }
    const std::string& label() const noexcept { return label_; }

    /// Power-law view: constant c is scale c with exponent 0.
    bool is_power_law() const noexcept { return kind_ != Kind::custom; }

    std::string describe() const;

private:
    Schedule(Kind kind, double scale, double offset, double exponent);

    Kind kind_;
    double scale_ = 0.0;
    double offset_ = 0.0;
    double exponent_ = 0.0;
    std::function<double(double)> fn_;
    std::string label_;
};

/// power_schedule(scale, offset, exponent): t -> scale * (t + offset)^(-exponent).
inline Schedule power_schedule(double scale, double offset, double exponent) {
    return Schedule::power(scale, offset, exponent);
}

/// Per-sensor step sizes and trigger thresholds plus the analysis constants
/// the assumption checkers need. delta, rho and epsilon0 are declared by the
/// user; they are never used by the estimator itself.
struct Schedules {
    std::vector<Schedule> alpha;      // alpha_i(t), one per sensor
    std::vector<Schedule> threshold;  // f_i(t), one per sensor
    std::optional<Schedule> reference_alpha;  // alpha(t); defaults to alpha[0]
    std::optional<Schedule> threshold_floor;  // f_bar(t); defaults to min_i f_i(t)
    std::optional<Schedule> beta;             // defaults to alpha(t)^(1 - 2(1-delta)/rho)
    double delta = 0.1;
    double rho = 4.0;
    std::optional<double> epsilon0;

    /// Same step size and threshold for all n sensors.
    static Schedules uniform(std::size_t n, const Schedule& alpha, const Schedule& threshold);

    std::size_t size() const noexcept { return alpha.size(); }
    const Schedule& reference() const;

    double f_max(double t) const;
    double f_min(double t) const;
};

}  // namespace evtrig
