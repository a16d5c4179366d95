#include "samkit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fmt/format.h>

namespace samkit {

std::size_t Dataset::size() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.records.size();
    return n;
}

std::vector<TrajectoryRecord> Dataset::flatten() const {
    std::vector<TrajectoryRecord> out;
    out.reserve(size());
    for (const auto& p : parts) out.insert(out.end(), p.records.begin(), p.records.end());
    return out;
}

JointLimits default_data_ranges() {
    JointLimits r;
    r.lower << 0, -30, -60, -60, -60, 0, 0;
    r.upper << 0, 30, 60, 60, 60, 0, 0;
    return r;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<JointConfig> interpolate(const JointConfig& a, const JointConfig& b, double max_step) {
    const double span = (b.values - a.values).cwiseAbs().maxCoeff();
    const int steps = std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-12)));
    std::vector<JointConfig> out;
    out.reserve(steps);
    for (int k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        out.emplace_back(Vector7(a.values + t * (b.values - a.values)));
    }
    out.back() = b;
    return out;
}

namespace {

JointConfig random_waypoint(const JointLimits& ranges, double q1, std::mt19937_64& rng) {
    JointConfig q;
    for (int i = 1; i < kNumJoints; ++i) {
        std::uniform_real_distribution<double> u(ranges.lower[i], ranges.upper[i]);
        q[i] = ranges.lower[i] == ranges.upper[i] ? ranges.lower[i] : u(rng);
    }
    q[0] = q1;
    return q;
}

}  // namespace

std::vector<JointConfig> gen_random_trajectory(const JointLimits& ranges, int n_waypoints, double interp_step,
                                               double q1, std::uint64_t seed) {
    if (!(interp_step > 0.0)) throw DomainError("gen_random_trajectory: interp_step must be positive");
    std::mt19937_64 rng(seed);
    JointConfig current;
    current[0] = q1;
    std::vector<JointConfig> out;
    for (int w = 0; w < n_waypoints; ++w) {
        const JointConfig next = random_waypoint(ranges, q1, rng);
        const auto seg = interpolate(current, next, interp_step);
        out.insert(out.end(), seg.begin(), seg.end());
        current = next;
    }
    return out;
}

Dataset collect_dataset(const std::vector<double>& q1_values, std::size_t n_per, const PlantParams& plant,
                        std::uint64_t seed, const JointLimits& ranges, double interp_step) {
    Dataset ds;
    ds.seed = seed;
    ds.plant_hash = plant_hash(plant);
    HysteresisPlant sim(plant);
    for (std::size_t i = 0; i < q1_values.size(); ++i) {
        TranslationSet part;
        part.q1 = q1_values[i];
        part.seed = derive_seed(seed, i);

        // Waypoints are drawn from one stream until enough samples exist.
        std::mt19937_64 rng(part.seed);
        std::vector<JointConfig> commands;
        JointConfig current;
        current[0] = part.q1;
        while (commands.size() < n_per) {
            const JointConfig next = random_waypoint(ranges, part.q1, rng);
            const auto seg = interpolate(current, next, interp_step);
            commands.insert(commands.end(), seg.begin(), seg.end());
            current = next;
        }
        commands.resize(n_per);

        sim.reset();
        part.records.reserve(n_per);
        for (std::size_t t = 0; t < n_per; ++t) part.records.push_back({t, commands[t], sim.step(commands[t])});
        ds.parts.push_back(std::move(part));
    }
    return ds;
}

namespace {

ErrorStats stats_from_errors(const std::vector<Vector7>& errors) {
    if (errors.empty()) throw DomainError("error_stats: no records");
    ErrorStats s;
    s.count = errors.size();
    const double n = static_cast<double>(errors.size());
    for (const auto& e : errors) {
        s.mae += e.cwiseAbs();
        s.mse += e;
    }
    s.mae /= n;
    s.mse /= n;
    for (const auto& e : errors) {
        s.mae_sd += (e.cwiseAbs() - s.mae).cwiseAbs2();
        s.mse_sd += (e - s.mse).cwiseAbs2();
    }
    s.mae_sd = (s.mae_sd / n).cwiseSqrt();
    s.mse_sd = (s.mse_sd / n).cwiseSqrt();
    return s;
}

}  // namespace

ErrorStats error_stats(const std::vector<TrajectoryRecord>& records) {
    std::vector<Vector7> errors;
    errors.reserve(records.size());
    for (const auto& r : records) errors.push_back(r.q_phy.values - r.q_cmd.values);
    return stats_from_errors(errors);
}

ErrorStats error_stats(const std::vector<JointConfig>& target, const std::vector<JointConfig>& achieved) {
    if (target.size() != achieved.size()) throw DomainError("error_stats: sequence lengths differ");
    std::vector<Vector7> errors;
    errors.reserve(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) errors.push_back(achieved[i].values - target[i].values);
    return stats_from_errors(errors);
}

double loop_repeatability(const PlantParams& plant, int joint, double amplitude, int cycles, double q1,
                          double interp_step) {
    if (joint < 1 || joint >= kNumJoints) throw DomainError("loop_repeatability: joint index must be in 1..6");
    if (cycles < 3) throw DomainError("loop_repeatability: need at least 3 cycles");
    JointConfig home;
    home[0] = q1;
    JointConfig up = home, down = home;
    up[joint] = amplitude;
    down[joint] = -amplitude;
    std::vector<JointConfig> cycle;
    for (const auto* target : {&up, &down, &home}) {
        const auto seg = interpolate(cycle.empty() ? home : cycle.back(), *target, interp_step);
        cycle.insert(cycle.end(), seg.begin(), seg.end());
    }
    HysteresisPlant sim(plant);
    std::vector<std::vector<double>> phy(cycles);
    for (int c = 0; c < cycles; ++c)
        for (const auto& q : cycle) phy[c].push_back(sim.step(q)[joint]);
    double total = 0.0;
    for (int c = 2; c < cycles; ++c) {
        double mae = 0.0;
        for (std::size_t i = 0; i < cycle.size(); ++i) mae += std::abs(phy[c][i] - phy[c - 1][i]);
        total += mae / static_cast<double>(cycle.size());
    }
    return total / (cycles - 2);
}

WindowSet make_windows(const std::vector<JointConfig>& inputs, const std::vector<JointConfig>& targets, int L,
                       const Normalizer& norm) {
    if (inputs.size() != targets.size()) throw DomainError("make_windows: input and target lengths differ");
    if (L < 1) throw DomainError("make_windows: L must be positive");
    const Eigen::Index n = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXf x(kNumJoints, n);
    WindowSet w;
    w.L = L;
    w.targets.resize(kNumJoints, n);
    for (Eigen::Index t = 0; t < n; ++t) {
        x.col(t) = norm.normalize(inputs[t].values).cast<float>();
        w.targets.col(t) = norm.normalize(targets[t].values).cast<float>();
    }
    w.inputs = Eigen::MatrixXf::Zero(kNumJoints, n * L);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index first = std::max<Eigen::Index>(0, t - L + 1);
        const Eigen::Index len = t - first + 1;
        w.inputs.block(0, t * L + (L - len), kNumJoints, len) = x.middleCols(first, len);
    }
    return w;
}

WindowSet make_windows(const std::vector<TrajectoryRecord>& trajectory, int L, const Normalizer& norm) {
    std::vector<JointConfig> in, out;
    in.reserve(trajectory.size());
    out.reserve(trajectory.size());
    for (const auto& r : trajectory) {
        in.push_back(r.q_phy);
        out.push_back(r.q_cmd);
    }
    return make_windows(in, out, L, norm);
}

WindowSet make_windows(const Dataset& ds, int L, const Normalizer& norm) {
    std::vector<WindowSet> parts;
    for (const auto& p : ds.parts) parts.push_back(make_windows(p.records, L, norm));
    return concat(parts);
}

WindowSet concat(const std::vector<WindowSet>& sets) {
    WindowSet out;
    if (sets.empty()) return out;
    out.L = sets.front().L;
    Eigen::Index n = 0;
    for (const auto& s : sets) {
        if (s.L != out.L) throw DomainError("concat: window lengths differ");
        n += s.size();
    }
    out.inputs.resize(kNumJoints, n * out.L);
    out.targets.resize(kNumJoints, n);
    Eigen::Index at = 0;
    for (const auto& s : sets) {
        out.inputs.middleCols(at * out.L, s.size() * static_cast<Eigen::Index>(out.L)) = s.inputs;
        out.targets.middleCols(at, s.size()) = s.targets;
        at += s.size();
    }
    return out;
}

std::string plant_hash(const PlantParams& p) {
    // FNV-1a over the raw parameter bytes.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const double* data, std::size_t n) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n * sizeof(double); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(p.deadzone_halfwidth.data(), 7);
    mix(p.backlash_width.data(), 7);
    mix(p.bw_alpha.data(), 7);
    mix(p.bw_beta.data(), 7);
    mix(p.bw_gamma.data(), 7);
    mix(p.bw_n.data(), 7);
    const double scalars[] = {p.bias_gain, p.bias_span, p.trans_gain_slope, p.noise_sd, p.coupling_saturation,
                              static_cast<double>(p.noise_seed)};
    mix(scalars, 6);
    mix(p.trans_gain_weight.data(), 7);
    mix(p.coupling.data(), 49);
    return fmt::format("{:016x}", h);
}

}  // namespace samkit
