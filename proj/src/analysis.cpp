#include "evtrig/analysis.hpp"

#include "evtrig/errors.hpp"
#include "evtrig/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace evtrig {

namespace {

std::size_t total_children(const RunTrace& trace) {
    std::size_t total = 0;
    for (const auto c : trace.child_counts) total += c;
    return total;
}

double min_eigen(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

}  // namespace

double communication_rate_raw(const RunTrace& trace, std::int64_t t) {
    if (t < 1 || t > trace.horizon) {
        throw ArgumentError("communication_rate: t must lie in [1, horizon]");
    }
    const std::size_t children = total_children(trace);
    if (children == 0) throw RateError("communication rate undefined on a graph without edges");
    double weighted = 0.0;
    for (std::size_t i = 0; i < trace.nodes; ++i) {
        weighted += static_cast<double>(trace.trigger_count(i, t)) *
                    static_cast<double>(trace.child_counts[i]);
    }
    return weighted / (static_cast<double>(t) * static_cast<double>(children));
}

double communication_rate(const RunTrace& trace, std::int64_t t) {
    return std::min(communication_rate_raw(trace, t), 1.0);
}

std::vector<double> communication_rate_series(const RunTrace& trace) {
    const std::size_t children = total_children(trace);
    if (children == 0) throw RateError("communication rate undefined on a graph without edges");
    // weighted sends per time, then a running sum
    std::vector<double> sends(static_cast<std::size_t>(trace.horizon) + 1, 0.0);
    for (std::size_t i = 0; i < trace.nodes; ++i) {
        for (const auto t : trace.send_times[i]) {
            if (t <= trace.horizon) {
                sends[static_cast<std::size_t>(t)] += static_cast<double>(trace.child_counts[i]);
            }
        }
    }
    std::vector<double> out(sends.size(), std::numeric_limits<double>::quiet_NaN());
    double cumulative = sends[0];
    for (std::size_t t = 1; t < sends.size(); ++t) {
        cumulative += sends[t];
        out[t] = std::min(1.0, cumulative / (static_cast<double>(t) * static_cast<double>(children)));
    }
    return out;
}

namespace {

void check_compatible(std::span<const RunTrace> traces) {
    if (traces.empty()) throw AggregationError("mse: no traces");
    const RunTrace& first = traces.front();
    for (const auto& tr : traces) {
        if (tr.nodes != first.nodes || tr.dim != first.dim || tr.horizon != first.horizon ||
            tr.theta.size() != first.theta.size() || tr.theta != first.theta) {
            throw AggregationError("mse: traces differ in N, M, theta or horizon");
        }
    }
}

}  // namespace

double mse(std::span<const RunTrace> traces, std::int64_t t) {
    check_compatible(traces);
    if (t < 0 || t > traces.front().horizon) throw ArgumentError("mse: t outside [0, horizon]");
    double total = 0.0;
    for (const auto& tr : traces) total += tr.squared_error[static_cast<std::size_t>(t)];
    return total / (static_cast<double>(traces.front().nodes) * static_cast<double>(traces.size()));
}

std::vector<double> mse_series(std::span<const RunTrace> traces) {
    check_compatible(traces);
    std::vector<double> out(static_cast<std::size_t>(traces.front().horizon) + 1, 0.0);
    for (const auto& tr : traces) {
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += tr.squared_error[t];
    }
    const double norm =
        static_cast<double>(traces.front().nodes) * static_cast<double>(traces.size());
    for (auto& v : out) v /= norm;
    return out;
}

double GramianReport::min_observability() const {
    return *std::min_element(observability_min_eigen.begin(), observability_min_eigen.end());
}

double GramianReport::min_network() const {
    return *std::min_element(network_min_eigen.begin(), network_min_eigen.end());
}

std::string GramianReport::to_text() const {
    std::ostringstream out;
    out << "gramian check (window " << window_length << ", " << windows << " windows, " << samples
        << " samples)\n";
    out << "  observability gramian lambda_min = " << min_observability() << "\n";
    out << "  network gramian lambda_min = " << min_network() << "\n";
    out << "  collectively observable: " << (collectively_observable() ? "true" : "false")
        << " (lambda_tilde = " << lambda_tilde << ")\n";
    out << "  balanced + spanning tree guarantee applies: "
        << (proposition_applies() ? "true" : "false") << "\n";
    return out.str();
}

std::string GramianReport::to_key_values(const std::string& prefix) const {
    std::ostringstream out;
    out.precision(12);
    out << prefix << ".observability_lambda_min=" << min_observability() << "\n"
        << prefix << ".network_lambda_min=" << min_network() << "\n"
        << prefix << ".collectively_observable=" << (collectively_observable() ? 1 : 0) << "\n"
        << prefix << ".proposition_applies=" << (proposition_applies() ? 1 : 0) << "\n";
    return out.str();
}

GramianReport gramian_check(const SensorGraph& g, const ObservationModel& model,
                            std::size_t window_length, std::size_t windows, std::size_t samples,
                            double lambda_tilde, std::uint64_t seed) {
    if (window_length < 1) throw ArgumentError("gramian_check: window length must be >= 1");
    if (windows < 1) throw ArgumentError("gramian_check: need at least one window");
    if (samples < 1) throw ArgumentError("gramian_check: need at least one sample");
    if (model.size() != g.size()) throw ModelError("gramian_check: model and graph sizes differ");

    const std::size_t n = g.size();
    const auto m = static_cast<Eigen::Index>(model.dim());
    const auto nm = static_cast<Eigen::Index>(n) * m;
    const std::size_t draws = model.deterministic() ? 1 : samples;

    GramianReport report;
    report.window_length = window_length;
    report.windows = windows;
    report.samples = draws;
    report.lambda_tilde = lambda_tilde;
    report.balanced = is_balanced(g);
    report.spanning_tree = has_spanning_tree(g);

    // blockdiag(H_i^T H_i) summed over each window, averaged over samples.
    std::vector<Eigen::MatrixXd> block_sums(windows, Eigen::MatrixXd::Zero(nm, m));
    for (std::size_t sample = 0; sample < draws; ++sample) {
        auto streams = derive_streams(mix64(seed + sample), n);
        for (std::size_t w = 0; w < windows; ++w) {
            for (std::size_t k = 0; k < window_length; ++k) {
                const auto t = static_cast<std::int64_t>(w * window_length + k);
                for (std::size_t i = 0; i < n; ++i) {
                    const Eigen::MatrixXd h = model.regressor(i)(t, streams[i].regressor);
                    block_sums[w].middleRows(static_cast<Eigen::Index>(i) * m, m) +=
                        h.transpose() * h;
                }
            }
        }
    }

    const Eigen::MatrixXd mirror = laplacian(g).mirror_laplacian;
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(nm, nm);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            kron.block(static_cast<Eigen::Index>(a) * m, static_cast<Eigen::Index>(b) * m, m, m) =
                mirror(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) *
                Eigen::MatrixXd::Identity(m, m);
        }
    }

    for (std::size_t w = 0; w < windows; ++w) {
        const Eigen::MatrixXd blocks = block_sums[w] / static_cast<double>(draws);
        Eigen::MatrixXd observability = Eigen::MatrixXd::Zero(m, m);
        Eigen::MatrixXd network = static_cast<double>(window_length) * kron;
        for (std::size_t i = 0; i < n; ++i) {
            const auto block = blocks.middleRows(static_cast<Eigen::Index>(i) * m, m);
            observability += block;
            network.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(i) * m, m, m) +=
                block;
        }
        report.observability_min_eigen.push_back(min_eigen(observability));
        report.network_min_eigen.push_back(min_eigen(network));
        if (w == 0) {
            report.first_observability_gramian = observability;
            report.first_network_gramian = network;
        }
    }
    return report;
}

RateFit fit_decay(std::span<const double> series, std::int64_t t1, std::int64_t t2) {
    if (t1 < 1 || t2 <= t1) throw FitError("fit_decay: window needs 1 <= t1 < t2");
    if (static_cast<std::size_t>(t2) >= series.size()) {
        throw FitError("fit_decay: window end beyond the series");
    }
    const auto count = static_cast<double>(t2 - t1 + 1);
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::int64_t t = t1; t <= t2; ++t) {
        const double v = series[static_cast<std::size_t>(t)];
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw FitError("fit_decay: non-positive value at t=" + std::to_string(t));
        }
        mean_x += std::log(static_cast<double>(t));
        mean_y += std::log(v);
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::int64_t t = t1; t <= t2; ++t) {
        const double dx = std::log(static_cast<double>(t)) - mean_x;
        sxx += dx * dx;
        sxy += dx * (std::log(series[static_cast<std::size_t>(t)]) - mean_y);
    }
    RateFit fit;
    fit.t1 = t1;
    fit.t2 = t2;
    fit.exponent = sxy / sxx;
    fit.log_intercept = mean_y - fit.exponent * mean_x;
    double ss = 0.0;
    for (std::int64_t t = t1; t <= t2; ++t) {
        const double r = std::log(series[static_cast<std::size_t>(t)]) -
                         (fit.log_intercept + fit.exponent * std::log(static_cast<double>(t)));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / count);
    return fit;
}

}  // namespace evtrig
