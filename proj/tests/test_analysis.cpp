#include "evtrig/analysis.hpp"
#include "evtrig/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace evtrig;
using Catch::Approx;

namespace {

// 1 <-> 2 <-> 3, so |N^c| = (1, 2, 1).
RunTrace line_trace() {
    RunTrace tr;
    tr.nodes = 3;
    tr.dim = 1;
    tr.horizon = 5;
    tr.theta = Eigen::VectorXd::Zero(1);
    tr.child_counts = {1, 2, 1};
    tr.send_times = {{0, 3}, {0}, {0, 2, 5}};
    tr.squared_error.assign(6, 0.0);
    return tr;
}

RunTrace constant_trace(double squared_error, std::size_t nodes = 1) {
    RunTrace tr;
    tr.nodes = nodes;
    tr.dim = 2;
    tr.horizon = 2;
    tr.theta = Eigen::Vector2d::Zero();
    tr.child_counts.assign(nodes, 0);
    tr.send_times.resize(nodes);
    tr.squared_error.assign(3, squared_error);
    return tr;
}

}  // namespace

TEST_CASE("communication rate on a hand-counted event log", "[analysis]") {
    const RunTrace tr = line_trace();
    // t = 5: K = (2, 1, 3) -> (2*1 + 1*2 + 3*1) / (5 * 4)
    CHECK(communication_rate(tr, 5) == Approx(7.0 / 20.0));
    // t = 3: K = (2, 1, 2) -> 6 / 12
    CHECK(communication_rate(tr, 3) == Approx(0.5));
    // t = 1: only the forced sends, 4 / 4
    CHECK(communication_rate(tr, 1) == 1.0);
    const auto series = communication_rate_series(tr);
    REQUIRE(series.size() == 6);
    CHECK(std::isnan(series[0]));
    for (std::int64_t t = 1; t <= 5; ++t) CHECK(series[static_cast<std::size_t>(t)] == Approx(communication_rate(tr, t)));
}

TEST_CASE("communication rate is capped at one", "[analysis]") {
    RunTrace tr = line_trace();
    tr.send_times = {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}};
    CHECK(communication_rate_raw(tr, 1) == Approx(2.0));
    CHECK(communication_rate(tr, 1) == 1.0);
    CHECK(communication_rate(tr, 5) == 1.0);
    CHECK_THROWS_AS(communication_rate(tr, 0), ArgumentError);
    CHECK_THROWS_AS(communication_rate(tr, 6), ArgumentError);
    tr.child_counts = {0, 0, 0};
    CHECK_THROWS_AS(communication_rate(tr, 3), RateError);
}

TEST_CASE("mean squared error", "[analysis]") {
    Eigen::MatrixXd x(1, 2);
    x << 3, 4;
    CHECK(squared_network_error(x, Eigen::Vector2d::Zero()) == 25.0);

    const std::vector<RunTrace> one = {constant_trace(25.0)};
    CHECK(mse(one, 2) == 25.0);

    // two sensors, two runs: (1/(N M0)) * total
    const std::vector<RunTrace> runs = {constant_trace(4.0, 2), constant_trace(8.0, 2)};
    CHECK(mse(runs, 1) == Approx(3.0));
    const std::vector<RunTrace> swapped = {runs[1], runs[0]};
    CHECK(mse_series(swapped) == mse_series(runs));

    std::vector<RunTrace> bad = {constant_trace(1.0), constant_trace(1.0, 2)};
    CHECK_THROWS_AS(mse(bad, 0), AggregationError);
    bad[1] = constant_trace(1.0);
    bad[1].theta = Eigen::Vector2d(1, 0);
    CHECK_THROWS_AS(mse_series(bad), AggregationError);
    CHECK_THROWS_AS(mse(std::vector<RunTrace>{}, 0), AggregationError);
    CHECK_THROWS_AS(mse(one, 3), ArgumentError);
}

TEST_CASE("observability gramian", "[analysis]") {
    const SensorGraph g = SensorGraph::from_edges(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    Eigen::MatrixXd h1(1, 2);
    h1 << 2, 0;
    Eigen::MatrixXd h2(1, 2);
    h2 << 0, std::sqrt(3.0);
    const ObservationModel model(2, {RegressorSource::fixed(h1), RegressorSource::fixed(h2)},
                                 {NoiseSource::gaussian(1.0), NoiseSource::gaussian(1.0)});
    const GramianReport r = gramian_check(g, model, 1, 3, 50);
    CHECK(r.samples == 1);  // deterministic model: exact single pass
    CHECK(r.first_observability_gramian.isApprox(Eigen::Vector2d(4, 3).asDiagonal().toDenseMatrix()));
    CHECK(r.min_observability() == Approx(3.0));
    CHECK(r.proposition_applies());

    const GramianReport w = gramian_check(g, model, 4, 2, 1);
    CHECK(w.min_observability() == Approx(12.0));

    const ObservationModel blind(2, {RegressorSource::fixed(h1), RegressorSource::fixed(h1)},
                                 {NoiseSource::gaussian(1.0), NoiseSource::gaussian(1.0)});
    const GramianReport b = gramian_check(g, blind, 1, 1, 1);
    CHECK(b.min_observability() == Approx(0.0).margin(1e-12));
    CHECK_FALSE(b.collectively_observable());
}

TEST_CASE("network gramian of the seven-sensor example", "[analysis]") {
    const SensorGraph g = test_support::figure_graph();
    std::vector<RegressorSource> h;
    std::vector<NoiseSource> v;
    Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(14, 14);
    for (int i = 0; i < 7; ++i) {
        Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 2);
        row(0, i % 2) = 1.0;
        h.push_back(RegressorSource::fixed(row));
        v.push_back(NoiseSource::gaussian(0.1));
        blocks.block(2 * i, 2 * i, 2, 2) = row.transpose() * row;
    }
    const GramianReport r = gramian_check(g, ObservationModel(2, h, v), 1, 1, 1);
    const Eigen::MatrixXd a = g.adjacency();
    const Eigen::MatrixXd l = Eigen::MatrixXd(a.rowwise().sum().asDiagonal()) - a;
    const Eigen::MatrixXd ref = test_support::kron_identity(0.5 * (l + l.transpose()), 2) + blocks;
    CHECK(r.first_network_gramian.isApprox(ref));
    CHECK(r.min_network() == Approx(test_support::jacobi_eigenvalues(ref).front()).epsilon(1e-10));
    CHECK(r.min_network() > 0.0);
    CHECK(r.min_observability() == Approx(3.0));
    CHECK(r.balanced);
    CHECK(r.spanning_tree);
}

TEST_CASE("intermittent regressors give p times the nominal gramian", "[analysis]") {
    const SensorGraph g(Eigen::MatrixXd::Zero(1, 1));
    Eigen::MatrixXd hm(1, 2);
    hm << 1, 1;
    const ObservationModel model(2, {RegressorSource::intermittent(hm, 0.4)}, {NoiseSource::gaussian(1.0)});
    const GramianReport r = gramian_check(g, model, 1, 1, 20000, 1e-8, 5);
    const Eigen::MatrixXd expected = 0.4 * hm.transpose() * hm;
    CHECK((r.first_observability_gramian - expected).cwiseAbs().maxCoeff() < 0.02);
    CHECK_THROWS_AS(gramian_check(g, model, 0, 1, 1), ArgumentError);
}

TEST_CASE("power-law decay fit", "[analysis]") {
    std::vector<double> s(1001);
    for (std::size_t t = 1; t < s.size(); ++t) s[t] = 7.0 * std::pow(static_cast<double>(t), -2.0);
    const RateFit fit = fit_decay(s, 10, 1000);
    CHECK(fit.exponent == Approx(-2.0).margin(1e-6));
    CHECK(std::exp(fit.log_intercept) == Approx(7.0).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-9);

    const std::vector<double> flat(50, 3.0);
    CHECK(fit_decay(flat, 1, 49).exponent == Approx(0.0).margin(1e-12));

    CHECK_THROWS_AS(fit_decay(s, 0, 10), FitError);
    CHECK_THROWS_AS(fit_decay(s, 10, 10), FitError);
    CHECK_THROWS_AS(fit_decay(s, 10, 1001), FitError);
    s[20] = 0.0;
    CHECK_THROWS_AS(fit_decay(s, 10, 30), FitError);
}
