#include "evtrig/analysis.hpp"
#include "evtrig/errors.hpp"
#include "evtrig/estimator.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace evtrig;
using Catch::Approx;

namespace {

ObservationModel scalar_model(double noise) {
    return ObservationModel(1, {RegressorSource::fixed(Eigen::MatrixXd::Ones(1, 1))},
                            {NoiseSource::gaussian(noise)});
}

ObservationModel figure_model(double noise) {
    std::vector<RegressorSource> h;
    std::vector<NoiseSource> v;
    for (int i = 0; i < 7; ++i) {
        Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 2);
        row(0, i % 2 == 0 ? 0 : 1) = 1.0;
        h.push_back(RegressorSource::fixed(row));
        v.push_back(NoiseSource::gaussian(noise));
    }
    return ObservationModel(2, h, v);
}

std::vector<Eigen::VectorXd> figure_initial() {
    std::vector<Eigen::VectorXd> x0;
    for (int i = 0; i < 7; ++i) x0.push_back(i % 2 == 0 ? Eigen::Vector2d(0, -100) : Eigen::Vector2d(100, 0));
    return x0;
}

}  // namespace

TEST_CASE("scalar estimator follows the running-mean product formula", "[estimator]") {
    const SensorGraph g(Eigen::MatrixXd::Zero(1, 1));
    const Schedules s = Schedules::uniform(1, power_schedule(1.0, 1.0, 1.0), Schedule::constant(0.0));
    const RunTrace trace = run(g, scalar_model(0.0), s, TrueParameter(Eigen::VectorXd::Constant(1, 5.0)),
                               {Eigen::VectorXd::Zero(1)}, 4, 1);
    // x(t) = 5 t / (t + 1)
    for (int t = 0; t <= 4; ++t) {
        const double expected = 5.0 * t / (t + 1.0);
        CHECK(std::sqrt(trace.squared_error[static_cast<std::size_t>(t)]) == Approx(5.0 - expected).margin(1e-12));
    }
    CHECK(trace.final_estimates(0, 0) == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("per-sensor estimator matches the stacked form on random small networks", "[estimator]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 5);
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(u(rng) * 3);
        const std::int64_t horizon = 1 + static_cast<std::int64_t>(u(rng) * 50);
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && u(rng) < 0.5) edges.push_back({i, j, 0.1 + 0.4 * u(rng)});
        const SensorGraph g = SensorGraph::from_edges(n, edges);

        std::vector<RegressorSource> h;
        std::vector<NoiseSource> v;
        std::vector<Schedule> alpha;
        std::vector<Schedule> threshold;
        std::vector<Eigen::VectorXd> x0;
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Index rows = 1 + static_cast<Eigen::Index>(u(rng) * 2);
            const Eigen::MatrixXd hi = Eigen::MatrixXd::NullaryExpr(rows, m, [&] { return u(rng) - 0.5; });
            h.push_back(u(rng) < 0.3 ? RegressorSource::intermittent(hi, 0.6) : RegressorSource::fixed(hi));
            v.push_back(NoiseSource::gaussian(0.5 * u(rng)));
            alpha.push_back(power_schedule(0.2 + 0.3 * u(rng), 1.0 + 5 * u(rng), 0.5 + 0.5 * u(rng)));
            threshold.push_back(power_schedule(0.05 + u(rng), 0.0, 0.2 + 0.6 * u(rng)));
            x0.push_back(Eigen::VectorXd::NullaryExpr(m, [&] { return 4.0 * (u(rng) - 0.5); }));
        }
        const ObservationModel model(static_cast<std::size_t>(m), h, v);
        const TrueParameter theta(Eigen::VectorXd::NullaryExpr(m, [&] { return 2.0 * (u(rng) - 0.5); }));
        Schedules s;
        s.alpha = alpha;
        s.threshold = threshold;
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(trial);

        EstimatorOptions options;
        options.snapshot_stride = 1;
        const RunTrace trace = run(g, model, s, theta, x0, horizon, seed, options);
        const auto ref = test_support::stacked_estimator(g, model, alpha, threshold, theta, x0, horizon, seed);

        INFO("trial " << trial << ", N=" << n << ", M=" << m << ", T=" << horizon);
        REQUIRE(trace.snapshots.size() == ref.states.size());
        double worst = 0.0;
        for (std::size_t t = 0; t < ref.states.size(); ++t) {
            const Eigen::MatrixXd& x = trace.snapshots[t];
            for (std::size_t i = 0; i < n; ++i) {
                const Eigen::VectorXd xi = x.row(static_cast<Eigen::Index>(i)).transpose();
                worst = std::max(worst, (xi - ref.states[t].segment(static_cast<Eigen::Index>(i) * m, m))
                                            .cwiseAbs()
                                            .maxCoeff());
            }
        }
        CHECK(worst <= 1e-9);
        CHECK(trace.send_times == ref.sends);
    }
}

TEST_CASE("zero thresholds reduce to the time-triggered update", "[estimator]") {
    const SensorGraph g = test_support::figure_graph();
    const ObservationModel model = figure_model(0.1);
    const Schedules s = Schedules::uniform(7, power_schedule(1, 0, 0.7), Schedule::constant(0.0));
    const TrueParameter theta(Eigen::Vector2d(-1, 2));
    EstimatorOptions options;
    options.snapshot_stride = 1;
    const RunTrace trace = run(g, model, s, theta, figure_initial(), 300, 77, options);
    const auto ref = test_support::direct_update(g, model, s.alpha, theta, figure_initial(), 300, 77);
    double worst = 0.0;
    for (std::size_t t = 0; t < ref.size(); ++t) {
        worst = std::max(worst, (trace.snapshots[t] - ref[t]).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-9);
    for (std::int64_t t = 1; t <= 300; ++t) CHECK(communication_rate(trace, t) == 1.0);
}

TEST_CASE("trigger deviation never exceeds the threshold at an update", "[estimator]") {
    const SensorGraph g = test_support::figure_graph();
    const Schedules s = Schedules::uniform(7, power_schedule(1, 0, 0.7), power_schedule(1, 0, 0.5));
    EstimatorOptions options;
    options.snapshot_stride = 1;
    const RunTrace trace = run(g, figure_model(0.1), s, TrueParameter(Eigen::Vector2d(-1, 2)), figure_initial(),
                               500, 5, options);
    CHECK(trace.max_trigger_slack <= 0.0);
    for (std::size_t j = 0; j < 7; ++j) {
        std::size_t k = 0;
        for (std::int64_t t = 1; t < 500; ++t) {
            while (k + 1 < trace.send_times[j].size() && trace.send_times[j][k + 1] <= t) ++k;
            const std::int64_t tau = trace.send_times[j][k];
            const double dev = (trace.snapshots[static_cast<std::size_t>(tau)].row(static_cast<Eigen::Index>(j)) -
                                trace.snapshots[static_cast<std::size_t>(t)].row(static_cast<Eigen::Index>(j)))
                                   .norm();
            CHECK(dev <= s.threshold[j](static_cast<double>(t)));
        }
    }
}

TEST_CASE("network_step bookkeeping", "[estimator]") {
    const SensorGraph g = test_support::figure_graph();
    const ObservationModel model = figure_model(0.1);
    const Schedules s = Schedules::uniform(7, power_schedule(1, 0, 0.7), Schedule::constant(INFINITY));
    const TrueParameter theta(Eigen::Vector2d(-1, 2));
    EstimatorState state = EstimatorState::initial(g, figure_initial());
    auto streams = derive_streams(3, 7);

    SECTION("t = 0 sends everything, infinite thresholds send nothing afterwards") {
        const StepResult first = network_step(state, g, model, s, theta, 0, streams);
        CHECK(first.events.size() == 7);
        for (std::int64_t t = 1; t < 20; ++t) CHECK(network_step(state, g, model, s, theta, t, streams).events.empty());
        for (const auto& sensor : state.sensors) CHECK(sensor.trigger_count == 1);
        // mailboxes still hold the t = 0 estimates
        CHECK(state.sensors[1].mailbox.front().value == figure_initial()[0]);
    }
    SECTION("steps must be taken in order") {
        CHECK_THROWS_AS(network_step(state, g, model, s, theta, 1, streams), PreconditionError);
        CHECK_THROWS_AS(trigger_check(state, 0, 0, 1.0), PreconditionError);
    }
}

TEST_CASE("horizon one records exactly the forced sends", "[estimator]") {
    const SensorGraph g = test_support::figure_graph();
    const Schedules s = Schedules::uniform(7, power_schedule(1, 0, 0.7), power_schedule(1, 0, 0.5));
    const RunTrace trace = run(g, figure_model(0.1), s, TrueParameter(Eigen::Vector2d(-1, 2)), figure_initial(), 1, 9);
    CHECK(trace.total_events() == 7);
    CHECK(trace.squared_error.size() == 2);
}

TEST_CASE("next-round delivery lags the mailbox by one step", "[estimator]") {
    // Two sensors, 1 -> 2, sensor 1 sees theta directly, sensor 2 sees nothing.
    const SensorGraph g = SensorGraph::from_edges(2, {{0, 1, 1.0}});
    const ObservationModel model(1,
                                 {RegressorSource::fixed(Eigen::MatrixXd::Ones(1, 1)),
                                  RegressorSource::fixed(Eigen::MatrixXd::Zero(1, 1))},
                                 {NoiseSource::gaussian(0.0), NoiseSource::gaussian(0.0)});
    const Schedules s = Schedules::uniform(2, Schedule::constant(0.5), Schedule::constant(0.0));
    const TrueParameter theta(Eigen::VectorXd::Constant(1, 1.0));
    const std::vector<Eigen::VectorXd> x0(2, Eigen::VectorXd::Zero(1));
    EstimatorOptions same;
    same.snapshot_stride = 1;
    EstimatorOptions next = same;
    next.delivery = Delivery::next_round;
    const RunTrace a = run(g, model, s, theta, x0, 3, 1, same);
    const RunTrace b = run(g, model, s, theta, x0, 3, 1, next);
    // x1: 0, 0.5, 0.75, 0.875
    // same round, x2 += 0.5 (x1 - x2): 0, 0, 0.25, 0.5
    // next round, x2 sees x1 one step late: 0, 0, 0, 0.25
    CHECK(a.snapshots[2](1, 0) == 0.25);
    CHECK(a.snapshots[3](1, 0) == 0.5);
    CHECK(b.snapshots[2](1, 0) == 0.0);
    CHECK(b.snapshots[3](1, 0) == 0.25);
}

TEST_CASE("divergence and input validation", "[estimator]") {
    const SensorGraph g(Eigen::MatrixXd::Zero(1, 1));
    const Schedules big = Schedules::uniform(1, Schedule::constant(5.0), Schedule::constant(0.0));
    const TrueParameter theta(Eigen::VectorXd::Constant(1, 1.0));
    try {
        run(g, scalar_model(0.0), big, theta, {Eigen::VectorXd::Zero(1)}, 100, 1);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.sensor() == 0);
        CHECK(e.time() > 0);
    }
    const Schedules ok = Schedules::uniform(1, Schedule::constant(0.1), Schedule::constant(0.0));
    CHECK_THROWS_AS(run(g, scalar_model(0.0), ok, theta, {Eigen::VectorXd::Zero(2)}, 10, 1), ModelError);
    CHECK_THROWS_AS(run(g, scalar_model(0.0), ok, theta, {Eigen::VectorXd::Zero(1)}, 0, 1), ArgumentError);
}
