#include "samkit/config.hpp"
#include "samkit/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace samkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("samkit_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("config files") {
    SUBCASE("shipped file equals the built-ins") {
        const Config a = load_config(SAMKIT_SOURCE_DIR "/config/samkit.conf");
        const Config b = default_config();
        CHECK(plant_hash(a.plant) == plant_hash(b.plant));
        CHECK(a.geometry.a3 == b.geometry.a3);
        CHECK(a.geometry.limits.lower == b.geometry.limits.lower);
        CHECK(a.cables.d_e == b.cables.d_e);
        CHECK(a.seed == b.seed);
    }
    SUBCASE("noisy profile") {
        CHECK(load_config(SAMKIT_SOURCE_DIR "/config/samkit_noisy.conf").plant.noise_sd == 0.3);
    }
    SUBCASE("save and load") {
        const fs::path dir = scratch_dir("cfg");
        Config c = default_config();
        c.geometry.l1 = 42.5;
        c.plant.bias_gain = 3.25;
        c.seed = 9;
        save_config(c, (dir / "x.conf").string());
        const Config back = load_config((dir / "x.conf").string());
        CHECK(back.geometry.l1 == 42.5);
        CHECK(plant_hash(back.plant) == plant_hash(c.plant));
        CHECK(back.seed == 9);
    }
    SUBCASE("malformed values") {
        const fs::path dir = scratch_dir("bad");
        std::ofstream((dir / "a.conf").string()) << "[geometry]\nl1_mm = abc\n";
        CHECK_THROWS_AS(load_config((dir / "a.conf").string()), ConfigError);
        std::ofstream((dir / "b.conf").string()) << "[plant]\nbacklash_width = 1, 2\n";
        CHECK_THROWS_AS(load_config((dir / "b.conf").string()), ConfigError);
        std::ofstream((dir / "c.conf").string()) << "[geometry]\ns2_mm = -1\n";
        CHECK_THROWS_AS(load_config((dir / "c.conf").string()), ConfigError);
        CHECK_THROWS_AS(load_config((dir / "missing.conf").string()), ConfigError);
        CHECK_THROWS_AS(parse_limits("0:1, 2:1"), ConfigError);
    }
}

TEST_CASE("json helpers") {
    RigidTransform T = RigidTransform::Identity();
    T.linear() = Eigen::AngleAxisd(0.3, Vector3(1, 2, 3).normalized()).toRotationMatrix();
    T.translation() = Vector3(1, -2, 3);
    const json j = transform_to_json(T);
    CHECK(j.size() == 16);
    CHECK(j[3].get<double>() == 1.0);
    CHECK((transform_from_json(j).matrix() - T.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    json bad = j;
    bad[0] = 2.0;
    CHECK_THROWS_AS(transform_from_json(bad), DomainError);
    CHECK_THROWS_AS(transform_from_json(json::array({1, 2})), DomainError);

    PlantState s;
    s.z[2] = 0.5;
    s.play[3] = -1.5;
    s.coupled[5] = 2.0;
    s.steps = 12;
    const PlantState back = plant_state_from_json(plant_state_to_json(s));
    CHECK(back.z == s.z);
    CHECK(back.play == s.play);
    CHECK(back.coupled == s.coupled);
    CHECK(back.steps == 12);

    const std::vector<MarkerCloud> clouds{{"r0", {Vector3(1, 2, 3), Vector3(4, 5, 6)}}};
    const auto cb = clouds_from_json(clouds_to_json(clouds));
    REQUIRE(cb.size() == 1);
    CHECK(cb[0].label == "r0");
    CHECK(cb[0].points[1] == Vector3(4, 5, 6));
}

TEST_CASE("dataset files") {
    const fs::path dir = scratch_dir("ds");
    Dataset ds = collect_dataset({0, 25}, 50, PlantParams::calibrated_default(), 3);
    ds.split = "valid";
    write_dataset(ds, dir.string());
    CHECK(fs::exists(dir / "trans_0.csv"));
    CHECK(fs::exists(dir / "trans_1.json"));
    std::ifstream in(dir / "trans_0.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("t,q1_cmd,q2_cmd", 0) == 0);
    const Dataset back = read_dataset(dir.string());
    CHECK(back.split == "valid");
    CHECK(back.seed == ds.seed);
    CHECK(back.plant_hash == ds.plant_hash);
    REQUIRE(back.parts.size() == 2);
    CHECK(back.parts[1].q1 == 25);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK((back.parts[1].records[i].q_phy.values - ds.parts[1].records[i].q_phy.values).cwiseAbs().maxCoeff() <
              1e-12);
    }
    CHECK_THROWS_AS(read_dataset((dir / "nothing").string()), ConfigError);
}

TEST_CASE("joint csv and reports") {
    const fs::path dir = scratch_dir("csv");
    const std::vector<JointConfig> qs{JointConfig(1, 2, 3, 4, 5, 6, 7), JointConfig(0.5, -2, 0, 0, 0, 0, 0)};
    write_joint_csv(qs, (dir / "q.csv").string());
    const auto back = read_joint_csv((dir / "q.csv").string());
    CHECK(back == qs);
    std::ofstream((dir / "bad.csv").string()) << "t,q1,q2\n0,1,2\n";
    CHECK_THROWS_AS(read_joint_csv((dir / "bad.csv").string()), ConfigError);

    TrackingReport r;
    r.q1 = 5;
    r.uncalibrated.mae[2] = 10;
    r.calibrated = r.uncalibrated;
    write_tracking_csv({r}, (dir / "t.csv").string());
    std::ifstream in(dir / "t.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "q1_mm,controller,stat,q1,q2,q3,q4,q5,q6,q7");

    WorkspaceOptions wo;
    wo.n_samples = 500;
    wo.voxel = 4;
    const WorkspaceGrid g = sample_workspace(SegmentParams{}, 0, WorkspaceMode::semi_active, wo);
    const json dump = voxel_dump(g);
    std::size_t total = 0, filled = 0;
    for (const auto& run : dump["rle"]) {
        total += run[1].get<std::size_t>();
        if (run[0].get<int>() == 1) filled += run[1].get<std::size_t>();
    }
    CHECK(total == g.occupancy.size());
    CHECK(filled == g.count());
}
