#include "evtrig/config.hpp"

#include "evtrig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace evtrig {

using nlohmann::json;

namespace {

std::string at(const std::string& field, std::size_t index) {
    return field + "[" + std::to_string(index) + "]";
}

std::string child(const std::string& field, const std::string& key) {
    return field.empty() ? key : field + "." + key;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field.empty() ? "<root>" : field, "expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(child(field, key), "unknown field");
        }
    }
}

const json& require(const json& j, const char* key, const std::string& field) {
    if (!j.contains(key)) throw ConfigError(child(field, key), "missing");
    return j.at(key);
}

double number(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError(field, "expected a number");
}

json number_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

std::int64_t integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& field) {
    if (!j.is_number_unsigned()) throw ConfigError(field, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string string_value(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "expected a string");
    return j.get<std::string>();
}

Eigen::VectorXd vector_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a non-empty array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(j[k], at(field, k));
    return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(number_to_json(v(k)));
    return out;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ConfigError(field, "expected a matrix as a non-empty array of rows");
    }
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Eigen::VectorXd row = vector_from(j[r], at(field, r));
        if (static_cast<std::size_t>(row.size()) != cols) throw ConfigError(at(field, r), "ragged matrix row");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

// ---- graph ----

GraphSpec graph_from(const json& j, const std::string& field) {
    GraphSpec g;
    const auto kind = string_value(require(j, "kind", field), child(field, "kind"));
    const std::int64_t nodes = integer(require(j, "nodes", field), child(field, "nodes"));
    if (nodes < 1) throw ConfigError(child(field, "nodes"), "must be >= 1");
    g.nodes = static_cast<std::size_t>(nodes);
    if (kind == "edges") {
        check_keys(j, {"kind", "nodes", "edges"}, field);
        g.kind = GraphSpec::Kind::edges;
        const auto& edges = require(j, "edges", field);
        const std::string ef = child(field, "edges");
        if (!edges.is_array()) throw ConfigError(ef, "expected an array of [from, to, weight]");
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& e = edges[k];
            if (!e.is_array() || e.size() < 2 || e.size() > 3) {
                throw ConfigError(at(ef, k), "expected [from, to] or [from, to, weight]");
            }
            const std::int64_t from = integer(e[0], at(ef, k));
            const std::int64_t to = integer(e[1], at(ef, k));
            if (from < 1 || to < 1 || from > nodes || to > nodes) {
                throw ConfigError(at(ef, k), "node index outside 1.." + std::to_string(nodes));
            }
            if (from == to) throw ConfigError(at(ef, k), "self loop");
            const double w = e.size() == 3 ? number(e[2], at(ef, k)) : 1.0;
            if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError(at(ef, k), "weight must be positive and finite");
            g.edges.push_back({static_cast<std::size_t>(from - 1), static_cast<std::size_t>(to - 1), w});
        }
    } else if (kind == "random_geometric") {
        check_keys(j, {"kind", "nodes", "radius", "seed"}, field);
        g.kind = GraphSpec::Kind::random_geometric;
        g.radius = number(require(j, "radius", field), child(field, "radius"));
        if (!(g.radius > 0.0)) throw ConfigError(child(field, "radius"), "must be positive");
        g.seed = j.contains("seed") ? unsigned_integer(j.at("seed"), child(field, "seed")) : 0;
    } else {
        throw ConfigError(child(field, "kind"), "expected 'edges' or 'random_geometric'");
    }
    return g;
}

json graph_to_json(const GraphSpec& g) {
    json out;
    out["nodes"] = g.nodes;
    if (g.kind == GraphSpec::Kind::edges) {
        out["kind"] = "edges";
        json edges = json::array();
        for (const auto& e : g.edges) edges.push_back(json::array({e.from + 1, e.to + 1, e.weight}));
        out["edges"] = edges;
    } else {
        out["kind"] = "random_geometric";
        out["radius"] = g.radius;
        out["seed"] = g.seed;
    }
    return out;
}

// ---- observation and noise ----

ObservationSpec observation_from(const json& j, std::size_t nodes, const std::string& field) {
    check_keys(j, {"types", "assignment", "assignment_counts"}, field);
    ObservationSpec spec;
    const auto& types = require(j, "types", field);
    const std::string tf = child(field, "types");
    if (!types.is_object() || types.empty()) throw ConfigError(tf, "expected a non-empty object");
    for (const auto& [name, value] : types.items()) {
        const std::string nf = child(tf, name);
        ObservationType type;
        if (value.is_object()) {
            check_keys(value, {"matrix", "observe_probability"}, nf);
            type.matrix = matrix_from(require(value, "matrix", nf), child(nf, "matrix"));
            if (value.contains("observe_probability")) {
                type.observe_probability =
                    number(value.at("observe_probability"), child(nf, "observe_probability"));
                if (!(type.observe_probability > 0.0 && type.observe_probability <= 1.0)) {
                    throw ConfigError(child(nf, "observe_probability"), "must lie in (0, 1]");
                }
            }
        } else {
            type.matrix = matrix_from(value, nf);
        }
        spec.types.emplace(name, std::move(type));
    }

    const bool has_list = j.contains("assignment");
    const bool has_counts = j.contains("assignment_counts");
    if (has_list == has_counts) {
        throw ConfigError(child(field, "assignment"), "give exactly one of assignment or assignment_counts");
    }
    if (has_list) {
        const auto& list = j.at("assignment");
        const std::string af = child(field, "assignment");
        if (!list.is_array()) throw ConfigError(af, "expected an array of type names");
        for (std::size_t k = 0; k < list.size(); ++k) spec.assignment.push_back(string_value(list[k], at(af, k)));
    } else {
        const auto& counts = j.at("assignment_counts");
        const std::string cf = child(field, "assignment_counts");
        if (!counts.is_array()) throw ConfigError(cf, "expected an array of [type, count]");
        for (std::size_t k = 0; k < counts.size(); ++k) {
            const auto& c = counts[k];
            if (!c.is_array() || c.size() != 2) throw ConfigError(at(cf, k), "expected [type, count]");
            const auto name = string_value(c[0], at(cf, k));
            const std::int64_t n = integer(c[1], at(cf, k));
            if (n < 0) throw ConfigError(at(cf, k), "count must be >= 0");
            spec.assignment_counts.emplace_back(name, static_cast<std::size_t>(n));
            spec.assignment.insert(spec.assignment.end(), static_cast<std::size_t>(n), name);
        }
    }
    if (spec.assignment.size() != nodes) {
        throw ConfigError(child(field, has_list ? "assignment" : "assignment_counts"),
                          "assigns " + std::to_string(spec.assignment.size()) + " sensors, graph has " +
                              std::to_string(nodes));
    }
    return spec;
}

json observation_to_json(const ObservationSpec& spec) {
    json out;
    json types = json::object();
    for (const auto& [name, type] : spec.types) {
        if (type.observe_probability < 1.0) {
            types[name] = {{"matrix", matrix_to_json(type.matrix)},
                           {"observe_probability", type.observe_probability}};
        } else {
            types[name] = matrix_to_json(type.matrix);
        }
    }
    out["types"] = types;
    if (!spec.assignment_counts.empty()) {
        json counts = json::array();
        for (const auto& [name, n] : spec.assignment_counts) counts.push_back(json::array({name, n}));
        out["assignment_counts"] = counts;
    } else {
        out["assignment"] = spec.assignment;
    }
    return out;
}

NoiseSpec noise_from(const json& j, std::size_t nodes, const std::string& field) {
    check_keys(j, {"kind", "std", "dof"}, field);
    NoiseSpec spec;
    const auto kind = j.contains("kind") ? string_value(j.at("kind"), child(field, "kind")) : "gaussian";
    if (kind == "gaussian") {
        spec.kind = NoiseSpec::Kind::gaussian;
    } else if (kind == "student_t") {
        spec.kind = NoiseSpec::Kind::student_t;
        spec.dof = number(require(j, "dof", field), child(field, "dof"));
        if (!(spec.dof > 2.0)) throw ConfigError(child(field, "dof"), "must be > 2 for finite variance");
    } else {
        throw ConfigError(child(field, "kind"), "expected 'gaussian' or 'student_t'");
    }
    const auto& sd = require(j, "std", field);
    const std::string sf = child(field, "std");
    if (sd.is_array()) {
        if (sd.size() != nodes) throw ConfigError(sf, "needs one entry per sensor");
        for (std::size_t k = 0; k < sd.size(); ++k) spec.stddev.push_back(number(sd[k], at(sf, k)));
    } else {
        spec.stddev.assign(nodes, number(sd, sf));
    }
    for (std::size_t k = 0; k < spec.stddev.size(); ++k) {
        if (!(spec.stddev[k] >= 0.0) || !std::isfinite(spec.stddev[k])) {
            throw ConfigError(sf, "standard deviations must be finite and >= 0");
        }
    }
    return spec;
}

json noise_to_json(const NoiseSpec& spec) {
    json out;
    out["kind"] = spec.kind == NoiseSpec::Kind::gaussian ? "gaussian" : "student_t";
    if (spec.kind == NoiseSpec::Kind::student_t) out["dof"] = spec.dof;
    const bool uniform = std::adjacent_find(spec.stddev.begin(), spec.stddev.end(),
                                            std::not_equal_to<>()) == spec.stddev.end();
    if (uniform && !spec.stddev.empty()) {
        out["std"] = spec.stddev.front();
    } else {
        out["std"] = spec.stddev;
    }
    return out;
}

// ---- schedules ----

std::vector<Schedule> per_sensor_schedules(const json& j, std::size_t nodes, const std::string& field) {
    if (j.is_array()) {
        if (j.size() != nodes) throw ConfigError(field, "needs one schedule per sensor");
        std::vector<Schedule> out;
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(schedule_from_json(j[k], at(field, k)));
        return out;
    }
    return std::vector<Schedule>(nodes, schedule_from_json(j, field));
}

bool same_schedule(const Schedule& a, const Schedule& b) {
    return schedule_to_json(a) == schedule_to_json(b);
}

json per_sensor_to_json(const std::vector<Schedule>& schedules) {
    const bool uniform = std::all_of(schedules.begin(), schedules.end(),
                                     [&](const Schedule& s) { return same_schedule(s, schedules.front()); });
    if (uniform && !schedules.empty()) return schedule_to_json(schedules.front());
    json out = json::array();
    for (const auto& s : schedules) out.push_back(schedule_to_json(s));
    return out;
}

void check_schedule_domain(const Schedule& s, std::int64_t first, std::int64_t last, bool positive,
                           const std::string& field) {
    for (const std::int64_t t : {first, last}) {
        double v = 0.0;
        try {
            v = s(static_cast<double>(t));
        } catch (const ScheduleError& e) {
            throw ConfigError(field, std::string("undefined at t=") + std::to_string(t) + ": " + e.what());
        }
        if (std::isnan(v) || v < 0.0 || (positive && !(v > 0.0 && std::isfinite(v)))) {
            throw ConfigError(field, std::string("value ") + std::to_string(v) + " at t=" + std::to_string(t) +
                                         (positive ? " is not a positive finite step size" : " is negative"));
        }
    }
}

// ---- algorithms ----

AlgorithmSpec algorithm_from(const json& j, const std::string& field) {
    const auto kind = string_value(require(j, "kind", field), child(field, "kind"));
    AlgorithmSpec spec;
    if (kind == "event_triggered") {
        check_keys(j, {"kind", "label", "delivery"}, field);
        spec = AlgorithmSpec::event_triggered();
        if (j.contains("delivery")) {
            const auto d = string_value(j.at("delivery"), child(field, "delivery"));
            if (d == "same_round" || d == "same-round") {
                spec.delivery = Delivery::same_round;
            } else if (d == "next_round" || d == "next-round") {
                spec.delivery = Delivery::next_round;
            } else {
                throw ConfigError(child(field, "delivery"), "expected 'same_round' or 'next_round'");
            }
        }
    } else if (kind == "baseline") {
        check_keys(j, {"kind", "label", "baseline", "period", "gain", "consensus_gain", "innovation_gain"}, field);
        BaselineKind bk;
        try {
            bk = baseline_kind_from_string(string_value(require(j, "baseline", field), child(field, "baseline")));
        } catch (const ArgumentError& e) {
            throw ConfigError(child(field, "baseline"), e.what());
        }
        std::int64_t period = 1;
        if (j.contains("period")) {
            const auto& p = j.at("period");
            if (p.is_string() && p.get<std::string>() == "matched") {
                period = 0;
            } else {
                period = integer(p, child(field, "period"));
                if (period < 1) throw ConfigError(child(field, "period"), "must be >= 1 or \"matched\"");
            }
        }
        spec = AlgorithmSpec::make_baseline(bk, period);
        if (j.contains("gain")) spec.gain = schedule_from_json(j.at("gain"), child(field, "gain"));
        if (j.contains("consensus_gain")) {
            if (bk != BaselineKind::consensus_innovations) {
                throw ConfigError(child(field, "consensus_gain"), "only used by consensus_innovations");
            }
            spec.consensus_gain = schedule_from_json(j.at("consensus_gain"), child(field, "consensus_gain"));
        }
        if (j.contains("innovation_gain")) {
            if (bk != BaselineKind::consensus_innovations) {
                throw ConfigError(child(field, "innovation_gain"), "only used by consensus_innovations");
            }
            spec.innovation_gain = matrix_from(j.at("innovation_gain"), child(field, "innovation_gain"));
        }
    } else {
        throw ConfigError(child(field, "kind"), "expected 'event_triggered' or 'baseline'");
    }
    if (j.contains("label")) spec.label = string_value(j.at("label"), child(field, "label"));
    return spec;
}

json algorithm_to_json(const AlgorithmSpec& spec) {
    json out;
    if (!spec.label.empty()) out["label"] = spec.label;
    if (spec.kind == AlgorithmSpec::Kind::event_triggered) {
        out["kind"] = "event_triggered";
        out["delivery"] = spec.delivery == Delivery::same_round ? "same_round" : "next_round";
        return out;
    }
    out["kind"] = "baseline";
    out["baseline"] = to_string(spec.baseline);
    out["period"] = spec.matched_period() ? json("matched") : json(spec.period);
    out["gain"] = schedule_to_json(spec.gain);
    if (spec.consensus_gain) out["consensus_gain"] = schedule_to_json(*spec.consensus_gain);
    if (spec.innovation_gain) out["innovation_gain"] = matrix_to_json(*spec.innovation_gain);
    return out;
}

}  // namespace

// ---- public ----

std::string AlgorithmSpec::display_name() const {
    if (!label.empty()) return label;
    return kind == Kind::event_triggered ? "event_triggered" : to_string(baseline);
}

BaselineConfig AlgorithmSpec::baseline_config(std::int64_t resolved_period) const {
    if (kind != Kind::baseline) throw ArgumentError("baseline_config on a non-baseline algorithm");
    BaselineConfig cfg;
    cfg.kind = baseline;
    cfg.period = resolved_period;
    cfg.gain = gain;
    if (consensus_gain) cfg.consensus_gain = *consensus_gain;
    cfg.innovation_gain = innovation_gain;
    return cfg;
}

AlgorithmSpec AlgorithmSpec::event_triggered(Delivery delivery) {
    AlgorithmSpec spec;
    spec.kind = Kind::event_triggered;
    spec.delivery = delivery;
    return spec;
}

AlgorithmSpec AlgorithmSpec::make_baseline(BaselineKind kind, std::int64_t period) {
    AlgorithmSpec spec;
    spec.kind = Kind::baseline;
    spec.baseline = kind;
    spec.period = period;
    switch (kind) {
        case BaselineKind::consensus_innovations:
            spec.gain = Schedule::power(10.0, 1.0, 0.7);
            spec.consensus_gain = Schedule::power(0.1, 1.0, 0.7);
            break;
        case BaselineKind::diffusion_lms:
        case BaselineKind::zhang:
            spec.gain = Schedule::power(1.0, 100.0, 0.7);
            break;
    }
    return spec;
}

json schedule_to_json(const Schedule& s) {
    switch (s.kind()) {
        case Schedule::Kind::power:
            return {{"kind", "power"}, {"scale", s.scale()}, {"offset", s.offset()}, {"exponent", s.exponent()}};
        case Schedule::Kind::constant:
            return {{"kind", "constant"}, {"value", number_to_json(s.value())}};
        case Schedule::Kind::custom:
            break;
    }
    throw ConfigError(s.label(), "custom schedules cannot be serialized");
}

Schedule schedule_from_json(const json& j, const std::string& field) {
    if (j.is_number() || j.is_string()) return Schedule::constant(number(j, field));
    const auto kind = string_value(require(j, "kind", field), child(field, "kind"));
    try {
        if (kind == "power") {
            check_keys(j, {"kind", "scale", "offset", "exponent"}, field);
            const double scale = j.contains("scale") ? number(j.at("scale"), child(field, "scale")) : 1.0;
            const double offset = j.contains("offset") ? number(j.at("offset"), child(field, "offset")) : 0.0;
            const double exponent = number(require(j, "exponent", field), child(field, "exponent"));
            return Schedule::power(scale, offset, exponent);
        }
        if (kind == "constant") {
            check_keys(j, {"kind", "value"}, field);
            return Schedule::constant(number(require(j, "value", field), child(field, "value")));
        }
    } catch (const ScheduleError& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(child(field, "kind"), "expected 'power' or 'constant'");
}

void validate(const ExperimentConfig& cfg) {
    const std::size_t n = cfg.graph.nodes;
    if (n < 1) throw ConfigError("graph.nodes", "must be >= 1");
    for (std::size_t k = 0; k < cfg.graph.edges.size(); ++k) {
        const auto& e = cfg.graph.edges[k];
        if (e.from >= n || e.to >= n || e.from == e.to) throw ConfigError(at("graph.edges", k), "bad endpoints");
    }
    if (cfg.theta.size() < 1 || !cfg.theta.allFinite()) throw ConfigError("theta", "must be a finite non-empty vector");
    const auto m = cfg.theta.size();

    if (cfg.observation.assignment.size() != n) throw ConfigError("observation.assignment", "needs one type per sensor");
    for (const auto& [name, type] : cfg.observation.types) {
        if (type.matrix.cols() != m) {
            throw ConfigError("observation.types." + name, "has " + std::to_string(type.matrix.cols()) +
                                                               " columns, theta has " + std::to_string(m));
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!cfg.observation.types.count(cfg.observation.assignment[k])) {
            throw ConfigError(at("observation.assignment", k),
                              "unknown type '" + cfg.observation.assignment[k] + "'");
        }
    }
    if (cfg.noise.stddev.size() != n) throw ConfigError("noise.std", "needs one entry per sensor");

    if (cfg.horizon < 1) throw ConfigError("horizon", "must be >= 1");
    if (cfg.runs < 1) throw ConfigError("runs", "must be >= 1");
    if (cfg.snapshot_stride < 0) throw ConfigError("snapshot_stride", "must be >= 0");
    if (!(cfg.divergence_bound > 0.0)) throw ConfigError("divergence_bound", "must be positive");

    if (cfg.alpha.size() != n) throw ConfigError("schedules.alpha", "needs one schedule per sensor");
    if (cfg.threshold.size() != n) throw ConfigError("schedules.threshold", "needs one schedule per sensor");
    for (std::size_t k = 0; k < n; ++k) {
        check_schedule_domain(cfg.alpha[k], 1, cfg.horizon, true, at("schedules.alpha", k));
        check_schedule_domain(cfg.threshold[k], 1, cfg.horizon, false, at("schedules.threshold", k));
    }
    if (cfg.reference_alpha) {
        check_schedule_domain(*cfg.reference_alpha, 1, cfg.horizon, true, "schedules.reference_alpha");
    }
    if (!(cfg.rho > 0.0)) throw ConfigError("schedules.rho", "must be positive");
    if (!std::isfinite(cfg.delta)) throw ConfigError("schedules.delta", "must be finite");

    if (cfg.initial.size() != n) throw ConfigError("initial", "needs one estimate per sensor");
    for (std::size_t k = 0; k < n; ++k) {
        if (cfg.initial[k].size() != m || !cfg.initial[k].allFinite()) {
            throw ConfigError(at("initial.estimates", k), "must be a finite vector of length " + std::to_string(m));
        }
    }

    std::vector<const AlgorithmSpec*> all{&cfg.algorithm};
    for (const auto& a : cfg.compare_with) all.push_back(&a);
    const bool has_event_triggered = std::any_of(all.begin(), all.end(), [](const AlgorithmSpec* a) {
        return a->kind == AlgorithmSpec::Kind::event_triggered;
    });
    std::set<std::string> labels;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const std::string field = k == 0 ? "algorithm" : at("compare_with", k - 1);
        const auto& a = *all[k];
        if (!labels.insert(a.display_name()).second) {
            throw ConfigError(child(field, "label"), "duplicate algorithm label '" + a.display_name() + "'");
        }
        if (a.kind != AlgorithmSpec::Kind::baseline) continue;
        if (a.matched_period() && !has_event_triggered) {
            throw ConfigError(child(field, "period"), "\"matched\" needs an event_triggered algorithm in the same config");
        }
        if (a.period < 0) throw ConfigError(child(field, "period"), "must be >= 1");
        check_schedule_domain(a.gain, 1, cfg.horizon, true, child(field, "gain"));
        if (a.consensus_gain) check_schedule_domain(*a.consensus_gain, 1, cfg.horizon, true, child(field, "consensus_gain"));
        if (a.innovation_gain && (a.innovation_gain->rows() != m || a.innovation_gain->cols() != m)) {
            throw ConfigError(child(field, "innovation_gain"), "must be M x M");
        }
    }
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j,
               {"name", "graph", "theta", "observation", "noise", "schedules", "initial", "horizon", "runs", "seed",
                "snapshot_stride", "divergence_bound", "algorithm", "compare_with", "output_dir"},
               "");
    ExperimentConfig cfg;
    if (j.contains("name")) cfg.name = string_value(j.at("name"), "name");
    cfg.graph = graph_from(require(j, "graph", ""), "graph");
    const std::size_t n = cfg.graph.nodes;
    cfg.theta = vector_from(require(j, "theta", ""), "theta");
    cfg.observation = observation_from(require(j, "observation", ""), n, "observation");
    cfg.noise = noise_from(require(j, "noise", ""), n, "noise");

    const auto& s = require(j, "schedules", "");
    check_keys(s, {"alpha", "threshold", "reference_alpha", "delta", "rho", "epsilon0"}, "schedules");
    cfg.alpha = per_sensor_schedules(require(s, "alpha", "schedules"), n, "schedules.alpha");
    cfg.threshold = per_sensor_schedules(require(s, "threshold", "schedules"), n, "schedules.threshold");
    if (s.contains("reference_alpha")) {
        cfg.reference_alpha = schedule_from_json(s.at("reference_alpha"), "schedules.reference_alpha");
    }
    if (s.contains("delta")) cfg.delta = number(s.at("delta"), "schedules.delta");
    if (s.contains("rho")) cfg.rho = number(s.at("rho"), "schedules.rho");
    if (s.contains("epsilon0")) cfg.epsilon0 = number(s.at("epsilon0"), "schedules.epsilon0");

    if (j.contains("initial")) {
        const auto& init = j.at("initial");
        check_keys(init, {"estimates", "value"}, "initial");
        if (init.contains("estimates") == init.contains("value")) {
            throw ConfigError("initial", "give exactly one of estimates or value");
        }
        if (init.contains("estimates")) {
            const auto& rows = init.at("estimates");
            if (!rows.is_array() || rows.size() != n) throw ConfigError("initial.estimates", "needs one vector per sensor");
            for (std::size_t k = 0; k < n; ++k) cfg.initial.push_back(vector_from(rows[k], at("initial.estimates", k)));
        } else {
            cfg.initial.assign(n, vector_from(init.at("value"), "initial.value"));
        }
    } else {
        cfg.initial.assign(n, Eigen::VectorXd::Zero(cfg.theta.size()));
    }

    cfg.horizon = integer(require(j, "horizon", ""), "horizon");
    if (j.contains("runs")) {
        const std::int64_t runs = integer(j.at("runs"), "runs");
        if (runs < 1) throw ConfigError("runs", "must be >= 1");
        cfg.runs = static_cast<std::size_t>(runs);
    }
    if (j.contains("seed")) cfg.seed = unsigned_integer(j.at("seed"), "seed");
    if (j.contains("snapshot_stride")) cfg.snapshot_stride = integer(j.at("snapshot_stride"), "snapshot_stride");
    if (j.contains("divergence_bound")) cfg.divergence_bound = number(j.at("divergence_bound"), "divergence_bound");

    cfg.algorithm = j.contains("algorithm") ? algorithm_from(j.at("algorithm"), "algorithm")
                                            : AlgorithmSpec::event_triggered();
    if (j.contains("compare_with")) {
        const auto& list = j.at("compare_with");
        if (!list.is_array()) throw ConfigError("compare_with", "expected an array of algorithms");
        for (std::size_t k = 0; k < list.size(); ++k) {
            cfg.compare_with.push_back(algorithm_from(list[k], at("compare_with", k)));
        }
    }
    if (j.contains("output_dir")) cfg.output_dir = string_value(j.at("output_dir"), "output_dir");

    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON in '") + path + "': " + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
    json out;
    if (!cfg.name.empty()) out["name"] = cfg.name;
    out["graph"] = graph_to_json(cfg.graph);
    out["theta"] = vector_to_json(cfg.theta);
    out["observation"] = observation_to_json(cfg.observation);
    out["noise"] = noise_to_json(cfg.noise);

    json s;
    s["alpha"] = per_sensor_to_json(cfg.alpha);
    s["threshold"] = per_sensor_to_json(cfg.threshold);
    if (cfg.reference_alpha) s["reference_alpha"] = schedule_to_json(*cfg.reference_alpha);
    s["delta"] = cfg.delta;
    s["rho"] = cfg.rho;
    if (cfg.epsilon0) s["epsilon0"] = *cfg.epsilon0;
    out["schedules"] = s;

    const bool uniform = std::all_of(cfg.initial.begin(), cfg.initial.end(),
                                     [&](const Eigen::VectorXd& v) { return v == cfg.initial.front(); });
    if (uniform && !cfg.initial.empty()) {
        out["initial"] = {{"value", vector_to_json(cfg.initial.front())}};
    } else {
        json rows = json::array();
        for (const auto& v : cfg.initial) rows.push_back(vector_to_json(v));
        out["initial"] = {{"estimates", rows}};
    }

    out["horizon"] = cfg.horizon;
    out["runs"] = cfg.runs;
    out["seed"] = cfg.seed;
    out["snapshot_stride"] = cfg.snapshot_stride;
    out["divergence_bound"] = cfg.divergence_bound;
    out["algorithm"] = algorithm_to_json(cfg.algorithm);
    if (!cfg.compare_with.empty()) {
        json list = json::array();
        for (const auto& a : cfg.compare_with) list.push_back(algorithm_to_json(a));
        out["compare_with"] = list;
    }
    if (!cfg.output_dir.empty()) out["output_dir"] = cfg.output_dir;
    return out;
}

SensorGraph build_graph(const ExperimentConfig& cfg) {
    if (cfg.graph.kind == GraphSpec::Kind::edges) return SensorGraph::from_edges(cfg.graph.nodes, cfg.graph.edges);
    return random_geometric(cfg.graph.nodes, cfg.graph.radius, cfg.graph.seed);
}

ObservationModel build_model(const ExperimentConfig& cfg) {
    std::vector<RegressorSource> regressors;
    std::vector<NoiseSource> noise;
    for (std::size_t i = 0; i < cfg.graph.nodes; ++i) {
        const auto& type = cfg.observation.types.at(cfg.observation.assignment[i]);
        regressors.push_back(type.observe_probability < 1.0
                                 ? RegressorSource::intermittent(type.matrix, type.observe_probability)
                                 : RegressorSource::fixed(type.matrix));
        noise.push_back(cfg.noise.kind == NoiseSpec::Kind::gaussian
                            ? NoiseSource::gaussian(cfg.noise.stddev[i])
                            : NoiseSource::student_t(cfg.noise.stddev[i], cfg.noise.dof));
    }
    return ObservationModel(cfg.dim(), std::move(regressors), std::move(noise));
}

Schedules build_schedules(const ExperimentConfig& cfg) {
    Schedules s;
    s.alpha = cfg.alpha;
    s.threshold = cfg.threshold;
    s.reference_alpha = cfg.reference_alpha;
    s.delta = cfg.delta;
    s.rho = cfg.rho;
    s.epsilon0 = cfg.epsilon0;
    return s;
}

EstimatorOptions build_options(const ExperimentConfig& cfg) {
    EstimatorOptions o;
    o.delivery = cfg.algorithm.kind == AlgorithmSpec::Kind::event_triggered ? cfg.algorithm.delivery
                                                                            : Delivery::same_round;
    o.divergence_bound = cfg.divergence_bound;
    o.snapshot_stride = cfg.snapshot_stride;
    return o;
}

}  // namespace evtrig
