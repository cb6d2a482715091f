#pragma once

#include "evtrig/schedule.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace evtrig {

/// Finite-horizon checks of the step-size and threshold conditions behind the
/// convergence and communication-rate guarantees. Asymptotic statements cannot
/// be decided numerically, so a symbolic verdict is issued only when every
/// schedule involved is a recognized power law; otherwise the condition is
/// reported as numeric_only with its finite-horizon trend.

enum class Verdict { pass, fail, numeric_only };

const char* to_string(Verdict v) noexcept;

struct ConditionResult {
    std::string id;           // e.g. "i.b", "iii.a", "2.iii"
    std::string description;
    Verdict verdict = Verdict::numeric_only;
    std::string detail;
    std::vector<std::pair<std::string, double>> values;

    double value(const std::string& key) const;
};

struct AssumptionReport {
    std::string name;
    std::vector<ConditionResult> conditions;

    Verdict overall() const;
    const ConditionResult& condition(const std::string& id) const;

    std::string to_text() const;
    /// One `prefix.id.key=value` line per reported number plus verdict lines.
    std::string to_key_values(const std::string& prefix) const;
};

/// Step-size and threshold conditions: reference-rate agreement, vanishing but
/// non-summable step size, the alpha_0 limit, square summability at
/// 2(1-delta), threshold decay relative to alpha^delta and summability of
/// alpha^(1-delta) f_max.
AssumptionReport check_assumption1(const Schedules& s, std::int64_t horizon);

/// Threshold-floor / beta / g conditions for communication-rate decay,
/// evaluated for a_0 in {0.1, 1, 10}.
AssumptionReport check_assumption2(const Schedules& s, std::int64_t horizon);

/// Numeric check that g is non-decreasing, g(t) <= t, and that
/// g(t + ceil(g(t))) - g(t) stays bounded below by a positive constant on the
/// tail window [horizon/2, horizon].
struct IncrementCheck {
    bool monotone = false;
    bool below_identity = false;
    double min_increment_early = 0.0;  // first half of the tail window
    double min_increment_late = 0.0;   // second half
    bool bounded_below = false;

    bool passed() const noexcept { return monotone && below_identity && bounded_below; }
};

IncrementCheck check_increment_condition(const std::function<double(double)>& g,
                                         std::int64_t horizon);

}  // namespace evtrig
