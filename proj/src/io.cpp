#include "samkit/io.hpp"

#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace samkit {

namespace fs = std::filesystem;

namespace {

std::vector<double> vec(const Eigen::Ref<const Eigen::VectorXd>& v) { return {v.data(), v.data() + v.size()}; }

Vector7 vec7(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 7) throw ConfigError("expected 7 values");
    return Eigen::Map<const Vector7>(v.data());
}

std::vector<double> split_numbers(const std::string& line, std::size_t expected, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("{}: bad number '{}'", where, cell));
        }
    }
    if (out.size() != expected)
        throw ConfigError(fmt::format("{}: expected {} columns, got {}", where, expected, out.size()));
    return out;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

void write_json(const json& j, const std::string& path) { write_text(j.dump(2) + "\n", path); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
}

json transform_to_json(const RigidTransform& T) {
    json a = json::array();
    const Eigen::Matrix4d M = T.matrix();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a.push_back(M(r, c));
    return a;
}

RigidTransform transform_from_json(const json& j) {
    if (!j.is_array() || j.size() != 16) throw DomainError("transform: expected 16 numbers");
    Eigen::Matrix4d M;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) M(r, c) = j[4 * r + c].get<double>();
    if (!M.row(3).isApprox(Eigen::RowVector4d(0, 0, 0, 1), 1e-12) || !is_rotation(M.topLeftCorner<3, 3>(), 1e-6))
        throw DomainError("transform: not a rigid transform");
    RigidTransform T = RigidTransform::Identity();
    T.linear() = M.topLeftCorner<3, 3>();
    T.translation() = M.topRightCorner<3, 1>();
    return T;
}

json frame_to_json(const FrameEstimate& f) {
    return {{"transform", transform_to_json(f.transform)},
            {"inlier_fraction", f.inlier_fraction},
            {"markers_used", f.markers_used}};
}

json cables_to_json(const CableDeltas& c) { return vec(c.values); }
json joints_to_json(const JointConfig& q) { return vec(q.values); }

json plant_state_to_json(const PlantState& s) {
    return {{"z", vec(s.z)},
            {"play", vec(s.play)},
            {"last_input", vec(s.last_input)},
            {"coupled", vec(s.coupled)},
            {"coupled_drive", vec(s.coupled_drive)},
            {"last_cmd", vec(s.last_cmd.values)},
            {"last_phy", vec(s.last_phy.values)},
            {"steps", s.steps}};
}

PlantState plant_state_from_json(const json& j) {
    try {
        PlantState s;
        s.z = vec7(j.at("z"));
        s.play = vec7(j.at("play"));
        s.last_input = vec7(j.at("last_input"));
        if (j.contains("coupled")) s.coupled = vec7(j.at("coupled"));
        if (j.contains("coupled_drive")) s.coupled_drive = vec7(j.at("coupled_drive"));
        s.last_cmd.values = vec7(j.at("last_cmd"));
        s.last_phy.values = vec7(j.at("last_phy"));
        s.steps = j.at("steps").get<std::uint64_t>();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("plant state: ") + e.what());
    }
}

json clouds_to_json(const std::vector<MarkerCloud>& clouds) {
    json a = json::array();
    for (const auto& c : clouds) {
        json pts = json::array();
        for (const auto& p : c.points) pts.push_back({p.x(), p.y(), p.z()});
        a.push_back({{"label", c.label}, {"points", std::move(pts)}});
    }
    return a;
}

std::vector<MarkerCloud> clouds_from_json(const json& j) {
    try {
        std::vector<MarkerCloud> out;
        for (const auto& e : j) {
            MarkerCloud c;
            c.label = e.at("label").get<std::string>();
            for (const auto& p : e.at("points")) {
                if (p.size() != 3) throw ConfigError("marker cloud: points need 3 coordinates");
                c.points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            }
            out.push_back(std::move(c));
        }
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("marker cloud: ") + e.what());
    }
}

void write_dataset(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
    json index = {{"seed", ds.seed}, {"plant_hash", ds.plant_hash}, {"split", ds.split}, {"parts", json::array()}};
    for (std::size_t i = 0; i < ds.parts.size(); ++i) {
        const auto& part = ds.parts[i];
        const std::string stem = fmt::format("trans_{}", i);
        std::ofstream out(fs::path(dir) / (stem + ".csv"));
        if (!out) throw ConfigError("cannot write dataset in " + dir);
        out << "t";
        for (const char* s : {"cmd", "phy"})
            for (int j = 1; j <= kNumJoints; ++j) out << ",q" << j << "_" << s;
        out << '\n';
        for (const auto& r : part.records) {
            out << r.t;
            for (int j = 0; j < kNumJoints; ++j) out << ',' << num(r.q_cmd[j]);
            for (int j = 0; j < kNumJoints; ++j) out << ',' << num(r.q_phy[j]);
            out << '\n';
        }
        const json side = {{"seed", part.seed},      {"dataset_seed", ds.seed}, {"plant_hash", ds.plant_hash},
                           {"q1", part.q1},          {"split", ds.split},       {"records", part.records.size()}};
        write_json(side, (fs::path(dir) / (stem + ".json")).string());
        index["parts"].push_back(stem);
    }
    write_json(index, (fs::path(dir) / "dataset.json").string());
}

Dataset read_dataset(const std::string& dir) {
    const json index = read_json((fs::path(dir) / "dataset.json").string());
    Dataset ds;
    try {
        ds.seed = index.at("seed").get<std::uint64_t>();
        ds.plant_hash = index.at("plant_hash").get<std::string>();
        ds.split = index.at("split").get<std::string>();
        for (const auto& stem_j : index.at("parts")) {
            const std::string stem = stem_j.get<std::string>();
            const json side = read_json((fs::path(dir) / (stem + ".json")).string());
            TranslationSet part;
            part.q1 = side.at("q1").get<double>();
            part.seed = side.at("seed").get<std::uint64_t>();
            const std::string path = (fs::path(dir) / (stem + ".csv")).string();
            std::ifstream in(path);
            if (!in) throw ConfigError("cannot read " + path);
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto v = split_numbers(line, 1 + 2 * kNumJoints, path);
                TrajectoryRecord r;
                r.t = static_cast<std::uint64_t>(v[0]);
                for (int j = 0; j < kNumJoints; ++j) {
                    r.q_cmd[j] = v[1 + j];
                    r.q_phy[j] = v[1 + kNumJoints + j];
                }
                part.records.push_back(r);
            }
            ds.parts.push_back(std::move(part));
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("dataset: ") + e.what());
    }
    return ds;
}

void write_joint_csv(const std::vector<JointConfig>& qs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "t,q1,q2,q3,q4,q5,q6,q7\n";
    for (std::size_t t = 0; t < qs.size(); ++t) {
        out << t;
        for (int j = 0; j < kNumJoints; ++j) out << ',' << num(qs[t][j]);
        out << '\n';
    }
}

std::vector<JointConfig> read_joint_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path);
    std::string line;
    std::getline(in, line);
    std::vector<JointConfig> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto v = split_numbers(line, 1 + kNumJoints, path);
        out.emplace_back(Eigen::Map<const Vector7>(v.data() + 1));
    }
    return out;
}

void write_tracking_csv(const std::vector<TrackingReport>& reps, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "q1_mm,controller,stat";
    for (const char* n : kJointNames) out << ',' << n;
    out << '\n';
    auto rows = [&](double q1, const char* who, const ErrorStats& s) {
        const std::pair<const char*, const Vector7*> items[] = {
            {"mae", &s.mae}, {"mae_sd", &s.mae_sd}, {"mse", &s.mse}, {"mse_sd", &s.mse_sd}};
        for (const auto& [name, v] : items) {
            out << num(q1) << ',' << who << ',' << name;
            for (int j = 0; j < kNumJoints; ++j) out << ',' << num((*v)[j]);
            out << '\n';
        }
    };
    for (const auto& r : reps) {
        rows(r.q1, "uncalibrated", r.uncalibrated);
        if (r.calibrated) {
            rows(r.q1, "calibrated", *r.calibrated);
            out << num(r.q1) << ",calibrated,improvement";
            for (int j = 0; j < kNumJoints; ++j) out << ',' << num(r.improvement[j]);
            out << '\n';
        }
    }
}

namespace {

json stats_json(const ErrorStats& s) {
    return {{"mae", vec(s.mae)}, {"mae_sd", vec(s.mae_sd)}, {"mse", vec(s.mse)}, {"mse_sd", vec(s.mse_sd)},
            {"count", s.count}};
}

json pos_json(const PositionStats& s) {
    return {{"mae", vec(s.mae)},
            {"sd", vec(s.sd)},
            {"euclid_mean", s.euclid_mean},
            {"euclid_sd", s.euclid_sd},
            {"count", s.count}};
}

}  // namespace

json tracking_to_json(const TrackingReport& rep) {
    json j = {{"q1", rep.q1}, {"seed", rep.seed}, {"uncalibrated", stats_json(rep.uncalibrated)}};
    if (rep.calibrated) {
        j["calibrated"] = stats_json(*rep.calibrated);
        j["improvement"] = vec(rep.improvement);
    }
    return j;
}

void write_box_csv(const BoxReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "controller,x_mae,x_sd,y_mae,y_sd,z_mae,z_sd,euclid_mean,euclid_sd,count\n";
    auto row = [&](const char* who, const PositionStats& s) {
        out << who;
        for (int a = 0; a < 3; ++a) out << ',' << num(s.mae[a]) << ',' << num(s.sd[a]);
        out << ',' << num(s.euclid_mean) << ',' << num(s.euclid_sd) << ',' << s.count << '\n';
    };
    row("uncalibrated", rep.uncalibrated);
    if (rep.calibrated) row("calibrated", *rep.calibrated);
}

json box_to_json(const BoxReport& rep) {
    json j = {{"uncalibrated", pos_json(rep.uncalibrated)},
              {"trials_run", rep.trials_run},
              {"trials_skipped", rep.trials_skipped},
              {"log", rep.log}};
    if (rep.calibrated) {
        j["calibrated"] = pos_json(*rep.calibrated);
        j["improvement"] = rep.improvement();
    }
    return j;
}

void write_workspace_csv(const WorkspaceReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "q1_max,volume_mm3,total_mm3,mode\n";
    for (const auto& r : rep.rows)
        out << num(r.q1_max) << ',' << num(r.volume) << ',' << num(r.total) << ',' << to_string(r.mode) << '\n';
}

json voxel_dump(const WorkspaceGrid& grid) {
    json rle = json::array();
    const auto& occ = grid.occupancy;
    for (std::size_t i = 0; i < occ.size();) {
        std::size_t n = 1;
        while (i + n < occ.size() && occ[i + n] == occ[i]) ++n;
        rle.push_back({static_cast<int>(occ[i] != 0), n});
        i += n;
    }
    const Vector3 hi = grid.hi();
    return {{"voxel", grid.voxel},
            {"lo", {grid.lo.x(), grid.lo.y(), grid.lo.z()}},
            {"hi", {hi.x(), hi.y(), hi.z()}},
            {"dims", {grid.dims.x(), grid.dims.y(), grid.dims.z()}},
            {"order", "x-fastest"},
            {"rle", std::move(rle)}};
}

}  // namespace samkit
