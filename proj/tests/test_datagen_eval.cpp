#include "samkit/evaluation.hpp"

#include <doctest.h>

using namespace samkit;

TEST_CASE("random trajectories") {
    const JointLimits r = default_data_ranges();
    const auto a = gen_random_trajectory(r, 30, 3.0, 25.0, 99);
    CHECK(a == gen_random_trajectory(r, 30, 3.0, 25.0, 99));
    CHECK(a != gen_random_trajectory(r, 30, 3.0, 25.0, 100));
    JointConfig prev(25, 0, 0, 0, 0, 0, 0);
    for (const auto& q : a) {
        CHECK((q.values - prev.values).cwiseAbs().maxCoeff() <= 3.0 + 1e-9);
        CHECK(q[0] == 25.0);
        CHECK(q[5] == 0.0);
        CHECK(q[6] == 0.0);
        for (int i = 1; i < 5; ++i) CHECK((q[i] >= r.lower[i] && q[i] <= r.upper[i]));
        prev = q;
    }
    JointLimits point;
    point.lower = point.upper = Vector7::Zero();
    for (const auto& q : gen_random_trajectory(point, 5, 3.0, 10.0, 1)) CHECK(q == JointConfig(10, 0, 0, 0, 0, 0, 0));
    CHECK_THROWS_AS(gen_random_trajectory(r, 5, 0.0, 0.0, 1), DomainError);
}

TEST_CASE("dataset collection") {
    const Dataset ds = collect_dataset({0, 10, 20, 30, 40, 50}, 1000, PlantParams::calibrated_default(), 5);
    CHECK(ds.size() == 6000);
    CHECK(ds.parts.size() == 6);
    CHECK(ds.plant_hash == plant_hash(PlantParams::calibrated_default()));
    CHECK(ds.plant_hash != plant_hash(PlantParams::identity()));
    for (const auto& p : ds.parts) CHECK(p.records.front().q_cmd[0] == p.q1);

    const Dataset id = collect_dataset({15}, 300, PlantParams::identity(), 5);
    for (const auto& r : id.parts[0].records) CHECK(r.q_cmd == r.q_phy);
}

TEST_CASE("error statistics") {
    std::vector<TrajectoryRecord> recs(10);
    CHECK(error_stats(recs).mae.isZero());
    for (auto& r : recs) r.q_phy[2] = 5.0;
    ErrorStats s = error_stats(recs);
    CHECK(s.mae[2] == 5.0);
    CHECK(s.mse[2] == 5.0);
    CHECK(s.mae_sd[2] == 0.0);
    for (std::size_t i = 0; i < recs.size(); ++i) recs[i].q_phy[2] = i % 2 ? 5.0 : -5.0;
    s = error_stats(recs);
    CHECK(s.mae[2] == 5.0);
    CHECK(s.mse[2] == 0.0);
    CHECK(s.mse_sd[2] == 5.0);
    CHECK_THROWS_AS(error_stats(std::vector<TrajectoryRecord>{}), DomainError);
}

TEST_CASE("supervision windows") {
    const Normalizer norm = Normalizer::from_limits(JointLimits{});
    std::vector<JointConfig> in, out;
    for (int t = 0; t < 5; ++t) {
        in.emplace_back(t, 0, 0, 0, 0, 0, 0);
        out.emplace_back(t, 1, 0, 0, 0, 0, 0);
    }
    const WindowSet w = make_windows(in, out, 3, norm);
    CHECK(w.size() == 5);
    CHECK(w.inputs.cols() == 15);
    // Window 0: two padded zero frames then frame 0 (q1 = 0 normalizes to -1).
    CHECK(w.inputs.block(0, 0, 7, 2).isZero());
    CHECK(w.inputs(0, 2) == doctest::Approx(-1.0));
    // Window 4 holds frames 2, 3, 4 oldest first.
    CHECK(w.inputs(0, 12) == doctest::Approx(norm.normalize(in[2].values)[0]));
    CHECK(w.inputs(0, 14) == doctest::Approx(norm.normalize(in[4].values)[0]));
    CHECK(w.targets(1, 4) == doctest::Approx(norm.normalize(out[4].values)[1]));
    const WindowSet both = concat({w, w});
    CHECK(both.size() == 10);
    CHECK(both.inputs.rightCols(15) == w.inputs);
    CHECK_THROWS_AS(make_windows(in, std::vector<JointConfig>(2), 3, norm), DomainError);
}

TEST_CASE("tracking evaluation") {
    TrackingOptions opts;
    opts.n_points = 200;
    SUBCASE("identity plant") {
        const TcnConfig cfg;
        CompensationController ctrl({identity_model(cfg, Normalizer::from_limits(JointLimits{}))});
        const TrackingReport r = run_tracking_eval(&ctrl, 15.0, PlantParams::identity(), 1, opts);
        CHECK(r.uncalibrated.mae.isZero());
        REQUIRE(r.calibrated);
        CHECK(r.calibrated->mae.maxCoeff() < 1e-3);
        CHECK(r.improvement.isZero());
    }
    SUBCASE("training translations are refused") {
        TcnModel<float> m(TcnConfig{}, Normalizer::from_limits(JointLimits{}));
        m.set_trained_q1({0, 10, 20});
        CompensationController ctrl({m});
        CHECK_THROWS_AS(run_tracking_eval(&ctrl, 10.0, PlantParams::calibrated_default(), 1, opts), DomainError);
        CHECK_NOTHROW(run_tracking_eval(&ctrl, 5.0, PlantParams::calibrated_default(), 1, opts));
    }
    SUBCASE("baseline only") {
        const TrackingReport r = run_tracking_eval(nullptr, 25.0, PlantParams::calibrated_default(), 1, opts);
        CHECK_FALSE(r.calibrated);
        CHECK(r.uncalibrated.mae[2] > 5.0);
    }
}

TEST_CASE("box pointing") {
    BoxOptions opts;
    opts.n_trials = 2;
    SUBCASE("ideal plant leaves only the vision error") {
        const BoxReport r = run_box_pointing(nullptr, PlantParams::identity(), SegmentParams{}, 3, opts);
        CHECK(r.trials_run + r.trials_skipped == 2);
        CHECK(r.uncalibrated.count == static_cast<std::size_t>(r.trials_run) * opts.heights.size());
        CHECK(r.uncalibrated.euclid_mean < 0.5);
    }
    SUBCASE("hysteresis shows up as position error") {
        const BoxReport r = run_box_pointing(nullptr, PlantParams::calibrated_default(), SegmentParams{}, 3, opts);
        CHECK(r.uncalibrated.euclid_mean > 5.0);
        CHECK(r.improvement() == 0.0);
    }
    SUBCASE("position statistics") {
        const PositionStats s = position_stats({Vector3(3, 4, 0), Vector3(-3, -4, 0)});
        CHECK(s.euclid_mean == 5.0);
        CHECK(s.euclid_sd == 0.0);
        CHECK(s.mae == Vector3(3, 4, 0));
        CHECK_THROWS_AS(position_stats({}), DomainError);
    }
}
