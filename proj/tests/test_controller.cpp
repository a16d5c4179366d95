#include "samkit/controller.hpp"
#include "samkit/plant.hpp"

#include <doctest.h>

using namespace samkit;

namespace {

TcnConfig small_config(std::uint64_t seed) {
    TcnConfig c;
    c.channels_hidden = 16;
    c.seed = seed;
    return c;
}

const Normalizer kNorm = Normalizer::from_limits(JointLimits{});

}  // namespace

TEST_CASE("construction checks") {
    CHECK_THROWS_AS(CompensationController({}), ConfigError);
    TcnConfig other = small_config(1);
    other.L = 50;
    CHECK_THROWS_AS(CompensationController({TcnModel<float>(small_config(1), kNorm), TcnModel<float>(other, kNorm)}),
                    ConfigError);
    CHECK_THROWS_AS(
        CompensationController({TcnModel<float>(small_config(1), kNorm), TcnModel<float>(small_config(2), Normalizer{})}),
        ConfigError);
    CHECK_NOTHROW(
        CompensationController({TcnModel<float>(small_config(1), kNorm), TcnModel<float>(small_config(2), kNorm)}));
}

TEST_CASE("history window") {
    CompensationController ctrl({TcnModel<float>(small_config(1), kNorm)});
    const JointConfig q(20, 5, 10, -10, 5, 0, 0);
    ctrl.compensate(q);
    const Eigen::MatrixXf w = ctrl.window();
    REQUIRE(w.cols() == 10);
    CHECK(w.leftCols(9).isZero());
    CHECK((w.col(9).cast<double>() - kNorm.normalize(q.values)).cwiseAbs().maxCoeff() < 1e-6);
    for (int i = 0; i < 15; ++i) ctrl.compensate(JointConfig(i, 0, 0, 0, 0, 0, 0));
    CHECK(ctrl.history_size() == 16);
    const Eigen::MatrixXf full = ctrl.window();
    CHECK(full(0, 9) == doctest::Approx(kNorm.normalize(JointConfig(14, 0, 0, 0, 0, 0, 0).values)[0]));
    CHECK(full(0, 0) == doctest::Approx(kNorm.normalize(JointConfig(5, 0, 0, 0, 0, 0, 0).values)[0]));
    ctrl.reset();
    CHECK(ctrl.history_size() == 0);
    CHECK(ctrl.window().isZero());
}

TEST_CASE("ensemble averaging") {
    const TcnModel<float> m(small_config(4), kNorm);
    CompensationController one({m});
    CompensationController three({m, m, m});
    const JointConfig q(10, 5, 20, -5, 10, 0, 0);
    for (int i = 0; i < 12; ++i) CHECK(one.compensate(q) == three.compensate(q));

    SUBCASE("member order does not matter") {
        const TcnModel<float> a(small_config(1), kNorm), b(small_config(2), kNorm), c(small_config(3), kNorm);
        CompensationController abc({a, b, c});
        CompensationController cab({c, a, b});
        for (int i = 0; i < 12; ++i) CHECK(abc.compensate(q) == cab.compensate(q));
    }
}

TEST_CASE("identity network passes the command through") {
    CompensationController ctrl({identity_model(small_config(1), kNorm)});
    const JointConfig q(30, 10, -40, 20, 5, 0, 0);
    CHECK((ctrl.compensate(q).values - q.values).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("clamping") {
    CompensationController raw({identity_model(small_config(1), kNorm)});
    CompensationController clamped({identity_model(small_config(1), kNorm)}, true, JointLimits{});
    // A desired value outside the limits survives the identity network; only the clamping controller trims it.
    const JointConfig q(30, 10, 70, 0, 0, 0, 0);
    CHECK(raw.compensate(q)[2] > 60.0);
    CHECK(clamped.compensate(q)[2] == doctest::Approx(60.0));
}

TEST_CASE("uncalibrated baseline") {
    const JointConfig q(125, 30, 60, -60, 60, 90, 60);
    CHECK(uncalibrated_pass(q) == q);
}

TEST_CASE("latency probe") {
    CompensationController ctrl({TcnModel<float>(small_config(1), kNorm)});
    ctrl.compensate(JointConfig(1, 2, 3, 4, 5, 0, 0));
    const Eigen::MatrixXf before = ctrl.window();
    const LatencyStats s = ctrl.latency_probe(500);
    CHECK(s.samples == 500);
    CHECK(s.p50_us <= s.p99_us);
    CHECK(s.p99_us <= s.max_us);
    CHECK(ctrl.window() == before);
    CHECK_THROWS_AS(ctrl.latency_probe(0), DomainError);
}

TEST_CASE("model ids") {
    const TcnModel<float> a(small_config(1), kNorm), b(small_config(2), kNorm);
    CHECK(model_id(a) == model_id(TcnModel<float>(small_config(1), kNorm)));
    CHECK(model_id(a) != model_id(b));
}
