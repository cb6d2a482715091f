#include "evtrig/analysis.hpp"
#include "evtrig/baselines.hpp"
#include "evtrig/errors.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace evtrig;
using Catch::Approx;

namespace {

ObservationModel figure_model(double noise) {
    std::vector<RegressorSource> h;
    std::vector<NoiseSource> v;
    for (int i = 0; i < 7; ++i) {
        Eigen::MatrixXd row = Eigen::MatrixXd::Zero(1, 2);
        row(0, i % 2) = 1.0;
        h.push_back(RegressorSource::fixed(row));
        v.push_back(NoiseSource::gaussian(noise));
    }
    return ObservationModel(2, h, v);
}

std::vector<Eigen::VectorXd> spread_initial(std::size_t n) {
    std::vector<Eigen::VectorXd> x0;
    for (std::size_t i = 0; i < n; ++i) x0.push_back(Eigen::Vector2d(static_cast<double>(i), -3.0 * i));
    return x0;
}

std::size_t edge_count(const SensorGraph& g) {
    std::size_t e = 0;
    for (auto c : g.child_counts()) e += c;
    return e;
}

}  // namespace

TEST_CASE("periodic baselines communicate every p-th round", "[baselines]") {
    const SensorGraph g = test_support::figure_graph();
    const TrueParameter theta(Eigen::Vector2d(-1, 2));
    for (auto kind : {BaselineKind::consensus_innovations, BaselineKind::diffusion_lms, BaselineKind::zhang}) {
        for (std::int64_t horizon : {1, 10, 11, 12, 100, 1000}) {
            BaselineConfig cfg;
            cfg.kind = kind;
            cfg.period = 11;
            const RunTrace trace = run_baseline(cfg, g, figure_model(0.1), theta, spread_initial(7), horizon, 3);
            const auto rounds = static_cast<std::size_t>((horizon + 10) / 11);  // ceil(T / 11)
            INFO(to_string(kind) << " T=" << horizon);
            CHECK(trace.total_messages() == rounds * edge_count(g));
            CHECK(communication_rate(trace, horizon) ==
                  Approx(std::min(1.0, static_cast<double>(rounds) / static_cast<double>(horizon))));
        }
    }
}

TEST_CASE("zhang with period one equals the zero-threshold estimator", "[baselines]") {
    const SensorGraph g = test_support::figure_graph();
    const ObservationModel model = figure_model(0.2);
    const TrueParameter theta(Eigen::Vector2d(-1, 2));
    const Schedule b = power_schedule(1, 100, 0.7);
    BaselineConfig cfg;
    cfg.kind = BaselineKind::zhang;
    cfg.period = 1;
    cfg.gain = b;
    EstimatorOptions options;
    options.snapshot_stride = 1;
    const RunTrace base = run_baseline(cfg, g, model, theta, spread_initial(7), 400, 21, options);
    const RunTrace et = run(g, model, Schedules::uniform(7, b, Schedule::constant(0.0)), theta, spread_initial(7),
                            400, 21, options);
    double worst = 0.0;
    for (std::size_t t = 0; t < base.snapshots.size(); ++t) {
        worst = std::max(worst, (base.snapshots[t] - et.snapshots[t]).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("one hand-computed step per baseline", "[baselines]") {
    // 1 -> 2 with weight 2, scalar theta = 3, both sensors observe it exactly.
    const SensorGraph g = SensorGraph::from_edges(2, {{0, 1, 2.0}});
    const ObservationModel model(1,
                                 {RegressorSource::fixed(Eigen::MatrixXd::Constant(1, 1, 1.0)),
                                  RegressorSource::fixed(Eigen::MatrixXd::Constant(1, 1, 2.0))},
                                 {NoiseSource::gaussian(0.0), NoiseSource::gaussian(0.0)});
    const TrueParameter theta(Eigen::VectorXd::Constant(1, 3.0));
    const std::vector<Eigen::VectorXd> x0 = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 5.0)};
    auto streams = derive_streams(1, 2);

    SECTION("consensus + innovations") {
        BaselineConfig cfg;
        cfg.kind = BaselineKind::consensus_innovations;
        cfg.gain = Schedule::constant(0.1);
        cfg.consensus_gain = Schedule::constant(0.05);
        BaselineState s = BaselineState::initial(cfg, g, model, x0);
        CHECK(s.innovation_gain(0, 0) == Approx(0.2));  // (1 + 4)^-1
        CHECK(baseline_step(cfg, s, g, model, theta, 0, streams));
        // x1 = 1 + 0.1 * 0.2 * (1 * (3 - 1)) = 1.04
        // x2 = 5 + 0.05 * 2 * (1 - 5) + 0.1 * 0.2 * (2 * (6 - 10)) = 4.44
        CHECK(s.estimates[0](0) == Approx(1.04));
        CHECK(s.estimates[1](0) == Approx(4.44));
    }
    SECTION("diffusion LMS") {
        BaselineConfig cfg;
        cfg.kind = BaselineKind::diffusion_lms;
        cfg.gain = Schedule::constant(0.1);
        BaselineState s = BaselineState::initial(cfg, g, model, x0);
        baseline_step(cfg, s, g, model, theta, 0, streams);
        // psi1 = 1 + 0.1 * 2 = 1.2, psi2 = 5 + 0.1 * 2 * (6 - 10) = 4.2
        CHECK(s.estimates[0](0) == Approx(1.2));
        CHECK(s.estimates[1](0) == Approx(2.7));
    }
    SECTION("zhang") {
        BaselineConfig cfg;
        cfg.kind = BaselineKind::zhang;
        cfg.gain = Schedule::constant(0.1);
        BaselineState s = BaselineState::initial(cfg, g, model, x0);
        baseline_step(cfg, s, g, model, theta, 0, streams);
        // x2 = 5 + 0.1 * (2 * (6 - 10) + 2 * (1 - 5)) = 3.4
        CHECK(s.estimates[0](0) == Approx(1.2));
        CHECK(s.estimates[1](0) == Approx(3.4));
    }
    SECTION("stale neighbor values between communication rounds") {
        BaselineConfig cfg;
        cfg.kind = BaselineKind::zhang;
        cfg.gain = Schedule::constant(0.1);
        cfg.period = 3;
        BaselineState s = BaselineState::initial(cfg, g, model, x0);
        CHECK(baseline_step(cfg, s, g, model, theta, 0, streams));
        CHECK_FALSE(baseline_step(cfg, s, g, model, theta, 1, streams));
        CHECK(s.received[1][0](0) == 1.0);  // still the t = 0 value of sensor 1
        CHECK_FALSE(baseline_step(cfg, s, g, model, theta, 2, streams));
        CHECK(baseline_step(cfg, s, g, model, theta, 3, streams));
        CHECK(s.received[1][0](0) != 1.0);
        CHECK_THROWS_AS(baseline_step(cfg, s, g, model, theta, 7, streams), PreconditionError);
    }
}

TEST_CASE("default innovation gain", "[baselines]") {
    Eigen::MatrixXd ha(1, 3);
    ha << 0, 0, 1;
    Eigen::MatrixXd hb(2, 3);
    hb << 1, 0, 0, 0, 1, 0;
    std::vector<RegressorSource> h;
    std::vector<NoiseSource> v;
    for (int i = 0; i < 6; ++i) {
        h.push_back(RegressorSource::fixed(i < 3 ? ha : hb));
        v.push_back(NoiseSource::gaussian(1.0));
    }
    bool singular = true;
    const Eigen::MatrixXd k = default_innovation_gain(ObservationModel(3, h, v), &singular);
    CHECK_FALSE(singular);
    CHECK(k.isApprox(Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3).asDiagonal().toDenseMatrix()));

    const ObservationModel only_a(3, {RegressorSource::fixed(ha)}, {NoiseSource::gaussian(1.0)});
    const Eigen::MatrixXd pinv = default_innovation_gain(only_a, &singular);
    CHECK(singular);
    CHECK(pinv(2, 2) == Approx(1.0));
    CHECK(pinv(0, 0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("baseline validation", "[baselines]") {
    const SensorGraph g = test_support::figure_graph();
    BaselineConfig cfg;
    cfg.period = 0;
    CHECK_THROWS_AS(run_baseline(cfg, g, figure_model(0.1), TrueParameter(Eigen::Vector2d(0, 0)),
                                 spread_initial(7), 10, 1),
                    ArgumentError);
    CHECK(baseline_kind_from_string("diffusion-lms") == BaselineKind::diffusion_lms);
    CHECK_THROWS_AS(baseline_kind_from_string("kalman"), ArgumentError);
}
