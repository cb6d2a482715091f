#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evtrig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Dimension mismatch between H_i(t), theta, noise or estimates.
class ModelError : public Error {
public:
    using Error::Error;
};

class ScheduleError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class GenerationError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

/// Communication rate queried on a graph without any edge.
class RateError : public Error {
public:
    using Error::Error;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& reason)
        : Error("config field '" + field + "': " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// An estimate left the finite range during a run.
class DivergenceError : public Error {
public:
    DivergenceError(std::int64_t time, std::size_t sensor, const std::string& what)
        : Error(what), time_(time), sensor_(sensor) {}

    std::int64_t time() const noexcept { return time_; }
    std::size_t sensor() const noexcept { return sensor_; }

private:
    std::int64_t time_;
    std::size_t sensor_;
};

}  // namespace evtrig
