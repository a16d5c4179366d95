#include "samkit/pose_estimation.hpp"
#include "samkit/synthetic_markers.hpp"

#include <doctest.h>

#include <bit>
#include <random>

using namespace samkit;

namespace {

Matrix3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    return Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
}

double transform_gap(const RigidTransform& a, const RigidTransform& b) {
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("sphere RANSAC") {
    std::mt19937_64 rng(1);
    RansacOptions opts;
    opts.radius = 5.0;

    SUBCASE("noiseless") {
        CloudOptions co;
        co.radius = 5.0;
        const auto cloud = synth_sphere_cloud(Vector3(10, 20, 30), "s", co, rng);
        CHECK((fit_sphere_ransac(cloud, opts).center - Vector3(10, 20, 30)).norm() < 1e-6);
    }
    SUBCASE("noise and outliers") {
        CloudOptions co{5.0, 400, 0.2, 0.3, 3.0};
        const auto cloud = synth_sphere_cloud(Vector3(10, 20, 30), "s", co, rng);
        const SphereFit f = fit_sphere_ransac(cloud, opts);
        CHECK((f.center - Vector3(10, 20, 30)).norm() < 0.3);
        CHECK(f.inlier_fraction >= 0.6);
        // Fixed seed, fixed data: identical answer.
        CHECK(fit_sphere_ransac(cloud, opts).center == f.center);
    }
    SUBCASE("too few points") {
        MarkerCloud c{"s", {Vector3(5, 0, 0), Vector3(0, 5, 0), Vector3(0, 0, 5)}};
        CHECK_THROWS_AS(fit_sphere_ransac(c, opts), DomainError);
    }
    SUBCASE("coplanar points") {
        MarkerCloud c{"s", {}};
        for (int i = 0; i < 20; ++i) c.points.emplace_back(std::cos(i * 0.3) * 5, std::sin(i * 0.3) * 5, 0.0);
        CHECK_THROWS_AS(fit_sphere_ransac(c, opts), DomainError);
    }
}

TEST_CASE("marker frames") {
    SUBCASE("canonical base markers give the identity") {
        const auto m = base_marker_positions();
        const FrameEstimate f = base_frame(m[0], m[1], m[2], Vector3::Zero());
        CHECK(transform_gap(f.transform, RigidTransform::Identity()) < 1e-12);
    }
    SUBCASE("canonical box markers give the identity") {
        const auto m = box_marker_positions();
        const FrameEstimate f = box_frame(m[0], m[1], m[2], Vector3::Zero());
        CHECK(transform_gap(f.transform, RigidTransform::Identity()) < 1e-12);
    }
    SUBCASE("rigid-motion equivariance") {
        std::mt19937_64 rng(5);
        const auto m = base_marker_positions();
        const auto b = box_marker_positions();
        const Vector3 off(1, -2, 3);
        for (int i = 0; i < 20; ++i) {
            RigidTransform T = RigidTransform::Identity();
            T.linear() = random_rotation(rng);
            T.translation() = Vector3::Random() * 50;
            const FrameEstimate f0 = base_frame(m[0], m[1], m[2], off);
            const FrameEstimate f1 = base_frame(T * m[0], T * m[1], T * m[2], off);
            CHECK(transform_gap(f1.transform, T * f0.transform) < 1e-9);
            const FrameEstimate g0 = box_frame(b[0], b[1], b[2], off);
            const FrameEstimate g1 = box_frame(T * b[0], T * b[1], T * b[2], off);
            CHECK(transform_gap(g1.transform, T * g0.transform) < 1e-9);
        }
    }
    SUBCASE("degenerate input") {
        const auto m = base_marker_positions();
        CHECK_THROWS_AS(base_frame(m[0], m[0], m[2], Vector3::Zero()), DomainError);
        CHECK_THROWS_AS(box_frame(Vector3(0, 0, 0), Vector3(1, 0, 0), Vector3(2, 0, 0), Vector3::Zero()), DomainError);
    }
}

TEST_CASE("end-effector registration") {
    const EeMarkerLayout layout = EeMarkerLayout::standard();
    std::mt19937_64 rng(9);
    RigidTransform T = RigidTransform::Identity();
    T.linear() = random_rotation(rng);
    T.translation() = Vector3(5, -10, 120);
    std::array<std::optional<Vector3>, 5> all;
    for (int i = 0; i < 5; ++i) all[i] = T * layout.positions[i];
    CHECK(transform_gap(ee_frame(all, layout).transform, T) < 1e-9);

    int triples = 0;
    for (unsigned mask : ee_subset_masks()) {
        if (std::popcount(mask) != 3) continue;
        ++triples;
        std::array<std::optional<Vector3>, 5> some;
        for (int i = 0; i < 5; ++i)
            if (mask & (1u << i)) some[i] = all[i];
        CHECK(transform_gap(ee_frame(some, layout).transform, T) < 1e-6);
    }
    CHECK(triples == 10);
    CHECK(ee_subset_masks().size() == 16);

    std::array<std::optional<Vector3>, 5> two;
    two[0] = all[0];
    two[3] = all[3];
    CHECK_THROWS_AS(ee_frame(two, layout), DomainError);
}

TEST_CASE("physical joints from frames") {
    const SegmentParams geom;
    SUBCASE("zero pose") {
        const RigidTransform base = RigidTransform::Identity();
        const IkResult r = physical_joints(base, manipulator_fk(JointConfig::zero(), geom), geom, JointConfig::zero());
        CHECK(r.converged);
        CHECK(r.q.values.cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("noiseless marker loop") {
        std::mt19937_64 rng(12);
        RigidTransform cam_T_base = RigidTransform::Identity();
        cam_T_base.linear() = Eigen::AngleAxisd(0.4, Vector3::UnitX()).toRotationMatrix();
        cam_T_base.translation() = Vector3(10, -20, 250);
        const JointConfig q(30, 10, 25, -20, 15, 20, 0);
        const RigidTransform cam_T_ee = cam_T_base * manipulator_fk(q, geom);
        CloudOptions co;
        auto clouds = synth_base_clouds(cam_T_base, co, rng);
        const auto ee = synth_ee_clouds(cam_T_ee, EeMarkerLayout::standard(), 0b11111, co, rng);
        clouds.insert(clouds.end(), ee.begin(), ee.end());
        const auto fits = fit_markers(clouds);
        const FrameEstimate fb = estimate_base_frame(fits, geom.p_offset);
        const FrameEstimate fe = estimate_ee_frame(fits, EeMarkerLayout::standard());
        JointConfig guess = q;
        guess.values.segment<5>(1).array() += 5.0;
        const IkResult r = physical_joints(fb.transform, fe.transform, geom, guess);
        CHECK(r.converged);
        CHECK((r.q.values - q.values).head<6>().cwiseAbs().maxCoeff() < 0.1);
    }
    SUBCASE("corrupted frame is reported") {
        RigidTransform ee = manipulator_fk(JointConfig(125, 0, 0, 0, 0, 0, 0), geom);
        ee.translation().z() += 50.0;
        CHECK_FALSE(physical_joints(RigidTransform::Identity(), ee, geom, JointConfig::zero()).converged);
    }
}

TEST_CASE("frame_from_axes rejects parallel axes") {
    CHECK_THROWS_AS(frame_from_axes(Vector3::UnitZ(), Vector3::UnitZ() * 2), DomainError);
    CHECK(is_rotation(frame_from_axes(Vector3(0.1, 1, 0), Vector3::UnitZ())));
}
