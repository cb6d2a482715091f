#include "evtrig/schedule.hpp"

#include "evtrig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evtrig {

Schedule::Schedule(Kind kind, double scale, double offset, double exponent)
    : kind_(kind), scale_(scale), offset_(offset), exponent_(exponent) {}

Schedule Schedule::power(double scale, double offset, double exponent) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ScheduleError("power schedule: scale must be positive and finite");
    }
    if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
        throw ScheduleError("power schedule: exponent must be >= 0");
    }
    if (!std::isfinite(offset)) {
        throw ScheduleError("power schedule: offset must be finite");
    }
    Schedule s(Kind::power, scale, offset, exponent);
    s.label_ = "power";
    return s;
}

Schedule Schedule::constant(double value) {
    if (!(value >= 0.0)) {
        throw ScheduleError("constant schedule: value must be >= 0");
    }
    Schedule s(Kind::constant, value, 0.0, 0.0);
    s.label_ = "constant";
    return s;
}

Schedule Schedule::custom(std::function<double(double)> fn, std::string label) {
    if (!fn) throw ScheduleError("custom schedule: empty callable");
    Schedule s(Kind::custom, 0.0, 0.0, 0.0);
    s.fn_ = std::move(fn);
    s.label_ = std::move(label);
    return s;
}

double Schedule::operator()(double t) const {
    switch (kind_) {
        case Kind::constant:
            return scale_;
        case Kind::custom:
            return fn_(t);
        case Kind::power: {
            if (exponent_ == 0.0) return scale_;
            const double base = t + offset_;
            if (!(base > 0.0)) {
                std::ostringstream msg;
                msg << "power schedule undefined at t=" << t << " (t + offset = " << base << ")";
                throw ScheduleError(msg.str());
            }
            return scale_ * std::pow(base, -exponent_);
        }
    }
    return 0.0;
}

std::string Schedule::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case Kind::constant:
            out << "constant(" << scale_ << ")";
            break;
        case Kind::custom:
            out << label_;
            break;
        case Kind::power:
            out << scale_ << "*(t+" << offset_ << ")^-" << exponent_;
            break;
    }
    return out.str();
}

Schedules Schedules::uniform(std::size_t n, const Schedule& alpha, const Schedule& threshold) {
    Schedules s;
    s.alpha.assign(n, alpha);
    s.threshold.assign(n, threshold);
    return s;
}

const Schedule& Schedules::reference() const {
    if (reference_alpha) return *reference_alpha;
    if (alpha.empty()) throw ScheduleError("schedules: no step sizes declared");
    return alpha.front();
}

double Schedules::f_max(double t) const {
    double out = 0.0;
    for (const auto& f : threshold) out = std::max(out, f(t));
    return out;
}

double Schedules::f_min(double t) const {
    double out = std::numeric_limits<double>::infinity();
    for (const auto& f : threshold) out = std::min(out, f(t));
    return out;
}

}  // namespace evtrig
