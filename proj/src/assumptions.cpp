#include "evtrig/assumptions.hpp"

#include "evtrig/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace evtrig {

namespace {

constexpr double kExponentTol = 1e-12;
constexpr double kIncrementStableTol = 0.01;

struct PowerView {
    double scale;
    double offset;
    double exponent;
    bool zero() const { return scale == 0.0; }
    bool infinite() const { return std::isinf(scale); }
};

std::optional<PowerView> power_view(const Schedule& s) {
    if (!s.is_power_law()) return std::nullopt;
    return PowerView{s.scale(), s.offset(), s.exponent()};
}

std::optional<std::vector<PowerView>> power_views(const std::vector<Schedule>& list) {
    std::vector<PowerView> out;
    for (const auto& s : list) {
        auto v = power_view(s);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

bool same(double a, double b) { return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(b)); }

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

ConditionResult make(std::string id, std::string description) {
    ConditionResult r;
    r.id = std::move(id);
    r.description = std::move(description);
    return r;
}

void check_horizon(std::int64_t horizon) {
    if (horizon < 2) throw ArgumentError("assumption checks need horizon >= 2");
}

}  // namespace

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::pass:
            return "pass";
        case Verdict::fail:
            return "fail";
        case Verdict::numeric_only:
            return "numeric-only";
    }
    return "?";
}

double ConditionResult::value(const std::string& key) const {
    for (const auto& [k, v] : values) {
        if (k == key) return v;
    }
    throw ArgumentError("condition " + id + " has no value '" + key + "'");
}

Verdict AssumptionReport::overall() const {
    bool numeric = false;
    for (const auto& c : conditions) {
        if (c.verdict == Verdict::fail) return Verdict::fail;
        if (c.verdict == Verdict::numeric_only) numeric = true;
    }
    return numeric ? Verdict::numeric_only : Verdict::pass;
}

const ConditionResult& AssumptionReport::condition(const std::string& id) const {
    for (const auto& c : conditions) {
        if (c.id == id) return c;
    }
    throw ArgumentError(name + ": no condition '" + id + "'");
}

std::string AssumptionReport::to_text() const {
    std::ostringstream out;
    out << name << ": " << to_string(overall()) << "\n";
    for (const auto& c : conditions) {
        out << "  [" << to_string(c.verdict) << "] " << c.id << "  " << c.description;
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
        for (const auto& [k, v] : c.values) out << "      " << k << " = " << fmt(v) << "\n";
    }
    return out.str();
}

std::string AssumptionReport::to_key_values(const std::string& prefix) const {
    std::ostringstream out;
    out.precision(12);
    out << prefix << ".verdict=" << to_string(overall()) << "\n";
    for (const auto& c : conditions) {
        out << prefix << "." << c.id << ".verdict=" << to_string(c.verdict) << "\n";
        for (const auto& [k, v] : c.values) out << prefix << "." << c.id << "." << k << "=" << v << "\n";
    }
    return out.str();
}

AssumptionReport check_assumption1(const Schedules& s, std::int64_t horizon) {
    check_horizon(horizon);
    if (s.alpha.empty()) throw ScheduleError("check_assumption1: no step sizes declared");

    AssumptionReport report;
    report.name = "step-size/threshold conditions";
    const Schedule& ref = s.reference();
    const double delta = s.delta;
    const auto H = static_cast<double>(horizon);

    if (!(delta >= 0.0 && delta < 0.5)) {
        auto c = make("delta", "declared delta lies in [0, 1/2)");
        c.verdict = Verdict::fail;
        c.detail = "delta = " + fmt(delta);
        report.conditions.push_back(c);
    }

    const auto ref_view = power_view(ref);
    const auto alpha_views = power_views(s.alpha);
    const auto f_views = power_views(s.threshold);

    // (i.a) alpha_i / alpha -> 1
    {
        auto c = make("i.a.ratio", "alpha_i(t)/alpha(t) -> 1 for every sensor");
        double max_dev = 0.0;
        double dev_at_horizon = 0.0;
        double dev_at_half = 0.0;
        for (std::int64_t t = 1; t <= horizon; ++t) {
            const double a = ref(static_cast<double>(t));
            for (const auto& ai : s.alpha) {
                const double dev = std::abs(ai(static_cast<double>(t)) / a - 1.0);
                max_dev = std::max(max_dev, dev);
                if (t == horizon) dev_at_horizon = std::max(dev_at_horizon, dev);
                if (t == horizon / 2) dev_at_half = std::max(dev_at_half, dev);
            }
        }
        c.values = {{"max_deviation", max_dev},
                    {"deviation_at_half_horizon", dev_at_half},
                    {"deviation_at_horizon", dev_at_horizon}};
        if (ref_view && alpha_views) {
            bool ok = true;
            for (const auto& v : *alpha_views) {
                ok = ok && same(v.exponent, ref_view->exponent) && same(v.scale, ref_view->scale);
            }
            c.verdict = ok ? Verdict::pass : Verdict::fail;
            c.detail = ok ? "equal exponents and scales" : "exponent or scale differs from alpha(t)";
        } else {
            c.detail = dev_at_horizon <= dev_at_half ? "deviation non-increasing" : "deviation growing";
        }
        report.conditions.push_back(c);
    }

    // (i.a) alpha -> 0, sum alpha = infinity
    double sum_alpha = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const double a = ref(static_cast<double>(t));
        sum_alpha += a;
        sum_sq += std::pow(a, 2.0 * (1.0 - delta));
    }
    {
        auto c = make("i.a.divergent", "alpha(t) > 0, alpha(t) -> 0 and sum alpha(t) diverges");
        c.values = {{"partial_sum", sum_alpha}, {"alpha_at_horizon", ref(H)}};
        if (ref_view) {
            const double e = ref_view->exponent;
            const bool ok = e > 0.0 && e <= 1.0 + kExponentTol;
            c.verdict = ok ? Verdict::pass : Verdict::fail;
            c.detail = "exponent " + fmt(e) + (ok ? " in (0, 1]" : " outside (0, 1]");
        }
        report.conditions.push_back(c);
    }

    // (i.a) 1/alpha(t+1) - 1/alpha(t) -> alpha_0
    {
        auto c = make("i.a.alpha0", "1/alpha(t+1) - 1/alpha(t) converges to alpha_0 >= 0");
        const double estimate = 1.0 / ref(H + 1.0) - 1.0 / ref(H);
        c.values = {{"alpha0_estimate", estimate}};
        if (ref_view) {
            const double e = ref_view->exponent;
            if (e < 1.0 - kExponentTol) {
                c.verdict = Verdict::pass;
                c.values.emplace_back("alpha0", 0.0);
                c.detail = "exponent < 1 gives alpha_0 = 0";
            } else if (e <= 1.0 + kExponentTol) {
                c.verdict = Verdict::pass;
                c.values.emplace_back("alpha0", 1.0 / ref_view->scale);
                c.detail = "exponent 1 gives alpha_0 = 1/scale";
            } else {
                c.verdict = Verdict::fail;
                c.detail = "exponent > 1: difference diverges";
            }
        }
        report.conditions.push_back(c);
    }

    // (i.b) sum alpha^(2(1-delta)) < infinity
    {
        auto c = make("i.b", "sum alpha(t)^(2(1-delta)) converges");
        c.values = {{"partial_sum", sum_sq}, {"power", 2.0 * (1.0 - delta)}};
        if (ref_view) {
            const double p = 2.0 * (1.0 - delta) * ref_view->exponent;
            c.verdict = p > 1.0 + kExponentTol ? Verdict::pass : Verdict::fail;
            c.detail = "2(1-delta)*exponent = " + fmt(p);
        }
        report.conditions.push_back(c);
    }

    // (iii.a) f_max / alpha^delta -> 0
    {
        auto c = make("iii.a", "f_max(t)/alpha(t)^delta -> 0");
        const auto ratio = [&](double t) { return s.f_max(t) / std::pow(ref(t), delta); };
        const double half = std::max(1.0, std::floor(H / 2.0));
        c.values = {{"ratio_at_half_horizon", ratio(half)}, {"ratio_at_horizon", ratio(H)}};
        if (ref_view && f_views) {
            bool ok = true;
            for (const auto& f : *f_views) {
                if (f.zero()) continue;
                if (f.infinite()) {
                    ok = false;
                    continue;
                }
                ok = ok && f.exponent > delta * ref_view->exponent + kExponentTol;
            }
            c.verdict = ok ? Verdict::pass : Verdict::fail;
            c.detail = ok ? "every threshold decays faster than alpha^delta"
                          : "some threshold decays no faster than alpha^delta";
        } else {
            c.detail = ratio(H) < ratio(half) ? "ratio decreasing" : "ratio not decreasing";
        }
        report.conditions.push_back(c);
    }

    // (iii.b) sum alpha^(1-delta) f_max < infinity
    {
        auto c = make("iii.b", "sum alpha(t)^(1-delta) f_max(t) converges");
        double partial = 0.0;
        for (std::int64_t t = 1; t <= horizon; ++t) {
            const double td = static_cast<double>(t);
            const double f = s.f_max(td);
            if (f > 0.0) partial += std::pow(ref(td), 1.0 - delta) * f;
        }
        c.values = {{"partial_sum", partial}};
        if (ref_view && f_views) {
            bool ok = true;
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& f : *f_views) {
                if (f.zero()) continue;
                if (f.infinite()) {
                    ok = false;
                    continue;
                }
                const double p = (1.0 - delta) * ref_view->exponent + f.exponent;
                worst = std::min(worst, p);
                ok = ok && p > 1.0 + kExponentTol;
            }
            if (std::isfinite(worst)) c.values.emplace_back("min_summand_exponent", worst);
            c.verdict = ok ? Verdict::pass : Verdict::fail;
        }
        report.conditions.push_back(c);
    }
    return report;
}

IncrementCheck check_increment_condition(const std::function<double(double)>& g,
                                         std::int64_t horizon) {
    check_horizon(horizon);
    IncrementCheck out;
    const std::int64_t start = std::max<std::int64_t>(1, horizon / 2);
    const std::int64_t mid = start + (horizon - start) / 2;

    out.monotone = true;
    out.below_identity = true;
    double prev = g(static_cast<double>(start));
    double min_early = std::numeric_limits<double>::infinity();
    double min_late = std::numeric_limits<double>::infinity();
    for (std::int64_t t = start; t <= horizon; ++t) {
        const auto td = static_cast<double>(t);
        const double gt = g(td);
        if (gt < prev) out.monotone = false;
        if (gt > td) out.below_identity = false;
        prev = gt;
        const double step = std::ceil(std::max(gt, 0.0));
        const double inc = g(td + step) - gt;
        if (t < mid) {
            min_early = std::min(min_early, inc);
        } else {
            min_late = std::min(min_late, inc);
        }
    }
    if (!std::isfinite(min_early)) min_early = min_late;
    out.min_increment_early = min_early;
    out.min_increment_late = min_late;
    out.bounded_below =
        min_late > 0.0 && min_late >= min_early - kIncrementStableTol * std::abs(min_early);
    return out;
}

AssumptionReport check_assumption2(const Schedules& s, std::int64_t horizon) {
    check_horizon(horizon);
    if (s.alpha.empty() || s.threshold.empty()) {
        throw ScheduleError("check_assumption2: step sizes and thresholds must be declared");
    }
    AssumptionReport report;
    report.name = "communication-rate conditions";
    const double delta = s.delta;
    const double rho = s.rho;
    const Schedule& ref = s.reference();

    if (!(rho > 2.0)) {
        auto c = make("rho", "declared rho > 2");
        c.verdict = Verdict::fail;
        c.detail = "rho = " + fmt(rho);
        report.conditions.push_back(c);
        return report;
    }
    const double kappa = 1.0 - 2.0 * (1.0 - delta) / rho;

    // f_bar and beta as callables, plus their power-law views when recognizable.
    std::function<double(double)> f_bar;
    std::optional<PowerView> f_bar_view;
    if (s.threshold_floor) {
        const Schedule floor = *s.threshold_floor;
        f_bar = [floor](double t) { return floor(t); };
        f_bar_view = power_view(floor);
    } else {
        f_bar = [&s](double t) { return s.f_min(t); };
        if (auto views = power_views(s.threshold)) {
            // asymptotically smallest threshold: largest exponent, then smallest scale
            PowerView best = views->front();
            for (const auto& v : *views) {
                if (v.exponent > best.exponent + kExponentTol ||
                    (same(v.exponent, best.exponent) && v.scale < best.scale)) {
                    best = v;
                }
            }
            f_bar_view = best;
        }
    }

    std::function<double(double)> beta;
    std::optional<PowerView> beta_view;
    if (s.beta) {
        const Schedule b = *s.beta;
        beta = [b](double t) { return b(t); };
        beta_view = power_view(b);
    } else {
        beta = [&ref, kappa](double t) { return std::pow(ref(t), kappa); };
        if (auto rv = power_view(ref)) {
            beta_view = PowerView{std::pow(rv->scale, kappa), rv->offset, rv->exponent * kappa};
        }
    }

    // (i) non-increasing f_bar <= f_min
    {
        auto c = make("2.i", "f_bar(t) non-increasing and f_bar(t) <= f_min(t)");
        bool monotone = true;
        bool below = true;
        double prev = f_bar(1.0);
        for (std::int64_t t = 1; t <= horizon; ++t) {
            const auto td = static_cast<double>(t);
            const double v = f_bar(td);
            if (v > prev) monotone = false;
            if (v > s.f_min(td) * (1.0 + 1e-12)) below = false;
            prev = v;
        }
        c.values = {{"monotone", monotone ? 1.0 : 0.0}, {"below_f_min", below ? 1.0 : 0.0}};
        c.verdict = (monotone && below) ? Verdict::pass : Verdict::fail;
        report.conditions.push_back(c);
    }

    // (ii) non-increasing beta
    {
        auto c = make("2.ii", "beta(t) non-increasing, beta = O(alpha^(1-2(1-delta)/rho))");
        bool monotone = true;
        double prev = beta(1.0);
        double max_ratio = 0.0;
        for (std::int64_t t = 1; t <= horizon; ++t) {
            const auto td = static_cast<double>(t);
            const double v = beta(td);
            if (v > prev) monotone = false;
            prev = v;
            max_ratio = std::max(max_ratio, v / std::pow(ref(td), kappa));
        }
        c.values = {{"monotone", monotone ? 1.0 : 0.0},
                    {"kappa", kappa},
                    {"max_ratio_to_alpha_kappa", max_ratio}};
        if (!monotone) {
            c.verdict = Verdict::fail;
        } else if (beta_view && power_view(ref)) {
            const bool ok = beta_view->exponent >= power_view(ref)->exponent * kappa - kExponentTol;
            c.verdict = ok ? Verdict::pass : Verdict::fail;
        } else {
            c.detail = "big-O relation checked numerically only";
        }
        report.conditions.push_back(c);
    }

    // (iii) g(t) = a0 f_bar(2t) / beta(t)
    {
        auto c = make("2.iii", "g(t) = a0 f_bar(2t)/beta(t) non-decreasing, g(t) <= t, "
                               "g(t+g(t)) - g(t) bounded below");
        bool numeric_ok = true;
        for (const double a0 : {0.1, 1.0, 10.0}) {
            const auto g = [&, a0](double t) { return a0 * f_bar(2.0 * t) / beta(t); };
            const IncrementCheck r = check_increment_condition(g, horizon);
            const std::string tag = "a0=" + fmt(a0);
            c.values.emplace_back(tag + ".monotone", r.monotone ? 1.0 : 0.0);
            c.values.emplace_back(tag + ".below_identity", r.below_identity ? 1.0 : 0.0);
            c.values.emplace_back(tag + ".min_increment_early", r.min_increment_early);
            c.values.emplace_back(tag + ".min_increment_late", r.min_increment_late);
            numeric_ok = numeric_ok && r.passed();
        }
        if (f_bar_view && beta_view) {
            if (f_bar_view->zero()) {
                c.verdict = Verdict::fail;
                c.detail = "zero threshold floor gives g = 0";
            } else {
                const double mu = beta_view->exponent - f_bar_view->exponent;
                c.values.emplace_back("growth_exponent", mu);
                const bool ok = mu > 0.5 + kExponentTol && mu < 1.0 - kExponentTol;
                c.verdict = ok ? Verdict::pass : Verdict::fail;
                c.detail = "g grows like t^" + fmt(mu) + (ok ? ", within (1/2, 1)" : ", outside (1/2, 1)");
            }
        } else {
            c.verdict = Verdict::numeric_only;
            c.detail = numeric_ok ? "numeric trend satisfied" : "numeric trend violated";
        }
        report.conditions.push_back(c);
    }
    return report;
}

}  // namespace evtrig
