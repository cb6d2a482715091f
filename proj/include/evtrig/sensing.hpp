#pragma once

#include "evtrig/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace evtrig {

/// The unknown static parameter theta (dimension M >= 1, finite entries).
class TrueParameter {
public:
    explicit TrueParameter(Eigen::VectorXd theta);

    const Eigen::VectorXd& value() const noexcept { return theta_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(theta_.size()); }

private:
    Eigen::VectorXd theta_;
};

/// Source of H_i(t) for a single sensor.
class RegressorSource {
public:
    using Fn = std::function<Eigen::MatrixXd(std::int64_t t, RngStream& rng)>;

    /// H_i(t) = h for every t.
    static RegressorSource fixed(Eigen::MatrixXd h);
    /// H_i(t) = h with probability p and the zero matrix otherwise, iid over t.
    static RegressorSource intermittent(Eigen::MatrixXd h, double probability);
    /// Arbitrary (possibly stochastic) process; must return rows x cols every call.
    static RegressorSource custom(Eigen::Index rows, Eigen::Index cols, Fn fn);

    Eigen::MatrixXd operator()(std::int64_t t, RngStream& rng) const;

    Eigen::Index rows() const noexcept { return rows_; }
    Eigen::Index cols() const noexcept { return cols_; }
    bool deterministic() const noexcept { return kind_ == Kind::fixed; }
    /// The nominal matrix for fixed/intermittent sources.
    const Eigen::MatrixXd& nominal() const noexcept { return matrix_; }
    double probability() const noexcept { return probability_; }
    bool is_intermittent() const noexcept { return kind_ == Kind::intermittent; }

private:
    enum class Kind { fixed, intermittent, custom };

    Kind kind_ = Kind::fixed;
    Eigen::MatrixXd matrix_;
    double probability_ = 1.0;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    Fn fn_;
};

/// Source of v_i(t) for a single sensor. Built-in sources are zero-mean and
/// independent across time given an independent stream per sensor.
class NoiseSource {
public:
    using Fn = std::function<Eigen::VectorXd(std::int64_t t, Eigen::Index rows, RngStream& rng)>;

    static NoiseSource gaussian(double stddev);
    /// Student-t with `dof` > 2 degrees of freedom rescaled to standard deviation `stddev`.
    static NoiseSource student_t(double stddev, double dof);
    static NoiseSource custom(Fn fn, std::string label = "custom");

    Eigen::VectorXd operator()(std::int64_t t, Eigen::Index rows, RngStream& rng) const;

    double stddev() const noexcept { return stddev_; }
    double dof() const noexcept { return dof_; }
    bool is_gaussian() const noexcept { return kind_ == Kind::gaussian; }
    bool is_student_t() const noexcept { return kind_ == Kind::student_t; }

private:
    enum class Kind { gaussian, student_t, custom };

    Kind kind_ = Kind::gaussian;
    double stddev_ = 0.0;
    double dof_ = 0.0;
    Fn fn_;
    std::string label_;
};

/// Independent streams owned by one sensor within one run.
struct SensorStreams {
    RngStream noise;
    RngStream regressor;

    static SensorStreams derive(std::uint64_t run_seed, std::size_t sensor);
};

std::vector<SensorStreams> derive_streams(std::uint64_t run_seed, std::size_t sensors);

struct Measurement {
    Eigen::MatrixXd h;
    Eigen::VectorXd y;
};

/// y_i(t) = H_i(t) theta + v_i(t) for every sensor.
class ObservationModel {
public:
    ObservationModel(std::size_t dim, std::vector<RegressorSource> regressors,
                     std::vector<NoiseSource> noise);

    std::size_t size() const noexcept { return regressors_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    /// m_i
    std::size_t rows(std::size_t i) const;
    bool deterministic() const;

    const RegressorSource& regressor(std::size_t i) const { return regressors_.at(i); }
    const NoiseSource& noise(std::size_t i) const { return noise_.at(i); }

    /// Draws H_i(t) from the regressor stream, then v_i(t) from the noise stream.
    Measurement sample(const TrueParameter& theta, std::size_t i, std::int64_t t,
                       SensorStreams& streams) const;

private:
    std::size_t dim_;
    std::vector<RegressorSource> regressors_;
    std::vector<NoiseSource> noise_;
};

/// y_i(t) only.
Eigen::VectorXd measure(const ObservationModel& model, const TrueParameter& theta, std::size_t i,
                        std::int64_t t, SensorStreams& streams);

}  // namespace evtrig
