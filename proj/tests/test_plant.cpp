#include "samkit/datagen.hpp"
#include "samkit/plant.hpp"

#include <doctest.h>

using namespace samkit;

TEST_CASE("identity plant") {
    HysteresisPlant p(PlantParams::identity());
    const auto traj = gen_random_trajectory(default_data_ranges(), 20, 3.0, 15.0, 4);
    for (const auto& q : traj) CHECK(p.step(q) == q);
}

TEST_CASE("constant command reaches a fixed point") {
    HysteresisPlant p(PlantParams::calibrated_default());
    const JointConfig q(20, 10, 30, -20, 15, 0, 0);
    JointConfig prev;
    for (int i = 0; i < 50; ++i) prev = p.step(q);
    for (int i = 0; i < 10; ++i) CHECK(p.step(q) == prev);
}

TEST_CASE("dead band flats and hysteresis loop") {
    PlantParams params;
    params.deadzone_halfwidth[2] = 3.0;
    HysteresisPlant p(params);
    // Inside the dead band the joint does not move.
    CHECK(p.step(JointConfig(0, 0, 2.0, 0, 0, 0, 0))[2] == 0.0);

    HysteresisPlant h(PlantParams::calibrated_default());
    auto sweep = [&](double from, double to) {
        std::vector<double> out;
        for (const auto& q : interpolate(JointConfig(0, 0, from, 0, 0, 0, 0), JointConfig(0, 0, to, 0, 0, 0, 0), 3.0))
            out.push_back(h.step(q)[2]);
        return out;
    };
    sweep(0, 60);
    const auto down = sweep(60, -60);
    const auto up = sweep(-60, 60);
    // At command 0 the descending and ascending branches differ: a loop, not a curve.
    CHECK(std::abs(down[19] - up[19]) > 5.0);
}

TEST_CASE("translation makes hysteresis worse") {
    const PlantParams params = PlantParams::calibrated_default();
    const Dataset ds = collect_dataset({0.0, 50.0}, 2000, params, 17);
    const auto s0 = error_stats(ds.parts[0].records);
    const auto s50 = error_stats(ds.parts[1].records);
    CHECK(s50.mae[2] > s0.mae[2] * 1.5);
    CHECK(s50.mae[3] > s0.mae[3]);
}

TEST_CASE("repeatability") {
    const PlantParams params = PlantParams::calibrated_default();
    CHECK(loop_repeatability(params, 2, 60.0, 4, 0.0) < 0.25);
    CHECK_THROWS_AS(loop_repeatability(params, 0, 60.0, 4, 0.0), DomainError);
    CHECK_THROWS_AS(loop_repeatability(params, 2, 60.0, 2, 0.0), DomainError);

    SUBCASE("same trajectory replayed from reset") {
        HysteresisPlant p(params);
        const auto traj = gen_random_trajectory(default_data_ranges(), 40, 3.0, 0.0, 8);
        const auto a = p.run(traj);
        p.reset();
        const auto b = p.run(traj);
        CHECK(a == b);
    }
    SUBCASE("noise profile") {
        PlantParams noisy = params;
        noisy.noise_sd = 0.3;
        HysteresisPlant p(noisy);
        const auto traj = gen_random_trajectory(default_data_ranges(), 40, 3.0, 0.0, 8);
        const auto a = p.run(traj);
        const auto b = p.run(traj);
        double mae = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) mae += std::abs(a[i][2] - b[i][2]);
        mae /= static_cast<double>(a.size());
        CHECK(mae < 1.6);
        CHECK(mae > 0.0);
    }
}

TEST_CASE("state can be saved and restored") {
    HysteresisPlant p(PlantParams::calibrated_default());
    const auto traj = gen_random_trajectory(default_data_ranges(), 10, 3.0, 10.0, 2);
    p.run(traj);
    const PlantState saved = p.state();
    const JointConfig q(10, 5, 5, 5, 5, 0, 0);
    const JointConfig first = p.step(q);
    p.set_state(saved);
    CHECK(p.step(q) == first);
}

TEST_CASE("parameter validation") {
    PlantParams p;
    p.backlash_width[1] = -1;
    CHECK_THROWS_AS(HysteresisPlant{p}, DomainError);
    p = PlantParams{};
    p.coupling(3, 3) = 0.5;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = PlantParams{};
    p.coupling_saturation = -1;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = PlantParams{};
    p.bw_n[0] = 0.5;
    CHECK_THROWS_AS(p.validate(), DomainError);
}
