#include "evtrig/sensing.hpp"

#include "evtrig/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace evtrig {

TrueParameter::TrueParameter(Eigen::VectorXd theta) : theta_(std::move(theta)) {
    if (theta_.size() < 1) throw ModelError("theta must have dimension >= 1");
    if (!theta_.allFinite()) throw ModelError("theta entries must be finite");
}

RegressorSource RegressorSource::fixed(Eigen::MatrixXd h) {
    if (h.rows() < 1 || h.cols() < 1) throw ModelError("observation matrix must be non-empty");
    if (!h.allFinite()) throw ModelError("observation matrix entries must be finite");
    RegressorSource s;
    s.kind_ = Kind::fixed;
    s.rows_ = h.rows();
    s.cols_ = h.cols();
    s.matrix_ = std::move(h);
    return s;
}

RegressorSource RegressorSource::intermittent(Eigen::MatrixXd h, double probability) {
    if (!(probability >= 0.0 && probability <= 1.0)) {
        throw ModelError("intermittent observation probability must lie in [0, 1]");
    }
    RegressorSource s = fixed(std::move(h));
    s.kind_ = Kind::intermittent;
    s.probability_ = probability;
    return s;
}

RegressorSource RegressorSource::custom(Eigen::Index rows, Eigen::Index cols, Fn fn) {
    if (rows < 1 || cols < 1) throw ModelError("custom regressor dimensions must be positive");
    if (!fn) throw ModelError("custom regressor: empty callable");
    RegressorSource s;
    s.kind_ = Kind::custom;
    s.rows_ = rows;
    s.cols_ = cols;
    s.fn_ = std::move(fn);
    return s;
}

Eigen::MatrixXd RegressorSource::operator()(std::int64_t t, RngStream& rng) const {
    switch (kind_) {
        case Kind::fixed:
            return matrix_;
        case Kind::intermittent:
            return rng.uniform() < probability_ ? matrix_
                                                : Eigen::MatrixXd::Zero(rows_, cols_).eval();
        case Kind::custom: {
            Eigen::MatrixXd h = fn_(t, rng);
            if (h.rows() != rows_ || h.cols() != cols_) {
                throw ModelError("custom regressor returned " + std::to_string(h.rows()) + "x" +
                                 std::to_string(h.cols()) + " at t=" + std::to_string(t) +
                                 ", expected " + std::to_string(rows_) + "x" +
                                 std::to_string(cols_));
            }
            return h;
        }
    }
    return matrix_;
}

NoiseSource NoiseSource::gaussian(double stddev) {
    if (!(stddev >= 0.0) || !std::isfinite(stddev)) {
        throw ModelError("noise standard deviation must be finite and >= 0");
    }
    NoiseSource s;
    s.kind_ = Kind::gaussian;
    s.stddev_ = stddev;
    s.label_ = "gaussian";
    return s;
}

NoiseSource NoiseSource::student_t(double stddev, double dof) {
    if (!(dof > 2.0)) throw ModelError("student-t noise needs dof > 2 for a finite variance");
    NoiseSource s = gaussian(stddev);
    s.kind_ = Kind::student_t;
    s.dof_ = dof;
    s.label_ = "student_t";
    return s;
}

NoiseSource NoiseSource::custom(Fn fn, std::string label) {
    if (!fn) throw ModelError("custom noise: empty callable");
    NoiseSource s;
    s.kind_ = Kind::custom;
    s.fn_ = std::move(fn);
    s.label_ = std::move(label);
    return s;
}

Eigen::VectorXd NoiseSource::operator()(std::int64_t t, Eigen::Index rows, RngStream& rng) const {
    Eigen::VectorXd v(rows);
    switch (kind_) {
        case Kind::gaussian:
            for (Eigen::Index k = 0; k < rows; ++k) v(k) = stddev_ * rng.gaussian();
            return v;
        case Kind::student_t: {
            std::chi_squared_distribution<double> chi2(dof_);
            const double unit_scale = std::sqrt((dof_ - 2.0) / dof_);
            for (Eigen::Index k = 0; k < rows; ++k) {
                const double z = rng.gaussian();
                const double w = chi2(rng.engine());
                v(k) = stddev_ * unit_scale * z / std::sqrt(w / dof_);
            }
            return v;
        }
        case Kind::custom:
            v = fn_(t, rows, rng);
            if (v.size() != rows) {
                throw ModelError("custom noise returned dimension " + std::to_string(v.size()) +
                                 ", expected " + std::to_string(rows));
            }
            return v;
    }
    return v;
}

SensorStreams SensorStreams::derive(std::uint64_t run_seed, std::size_t sensor) {
    return SensorStreams{RngStream(stream_seed(run_seed, sensor, StreamPurpose::noise)),
                         RngStream(stream_seed(run_seed, sensor, StreamPurpose::regressor))};
}

std::vector<SensorStreams> derive_streams(std::uint64_t run_seed, std::size_t sensors) {
    std::vector<SensorStreams> out;
    out.reserve(sensors);
    for (std::size_t i = 0; i < sensors; ++i) out.push_back(SensorStreams::derive(run_seed, i));
    return out;
}

ObservationModel::ObservationModel(std::size_t dim, std::vector<RegressorSource> regressors,
                                   std::vector<NoiseSource> noise)
    : dim_(dim), regressors_(std::move(regressors)), noise_(std::move(noise)) {
    if (dim_ < 1) throw ModelError("parameter dimension must be >= 1");
    if (regressors_.empty()) throw ModelError("observation model needs at least one sensor");
    if (noise_.size() != regressors_.size()) {
        throw ModelError("observation model: " + std::to_string(regressors_.size()) +
                         " regressor sources but " + std::to_string(noise_.size()) +
                         " noise sources");
    }
    for (std::size_t i = 0; i < regressors_.size(); ++i) {
        if (static_cast<std::size_t>(regressors_[i].cols()) != dim_) {
            throw ModelError("sensor " + std::to_string(i) + ": H has " +
                             std::to_string(regressors_[i].cols()) + " columns, expected " +
                             std::to_string(dim_));
        }
    }
}

std::size_t ObservationModel::rows(std::size_t i) const {
    return static_cast<std::size_t>(regressors_.at(i).rows());
}

bool ObservationModel::deterministic() const {
    for (const auto& r : regressors_) {
        if (!r.deterministic()) return false;
    }
    return true;
}

Measurement ObservationModel::sample(const TrueParameter& theta, std::size_t i, std::int64_t t,
                                     SensorStreams& streams) const {
    if (theta.dim() != dim_) {
        throw ModelError("theta has dimension " + std::to_string(theta.dim()) + ", model expects " +
                         std::to_string(dim_));
    }
    const RegressorSource& source = regressors_.at(i);
    Measurement m;
    m.h = source(t, streams.regressor);
    m.y = m.h * theta.value() + noise_[i](t, source.rows(), streams.noise);
    return m;
}

Eigen::VectorXd measure(const ObservationModel& model, const TrueParameter& theta, std::size_t i,
                        std::int64_t t, SensorStreams& streams) {
    return model.sample(theta, i, t, streams).y;
}

}  // namespace evtrig
