#pragma once

#include "samkit/plant.hpp"
#include "samkit/tcn.hpp"
#include "samkit/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace samkit {

/// One (q_cmd, q_phy) pair with its step index.
struct TrajectoryRecord {
    std::uint64_t t = 0;
    JointConfig q_cmd;
    JointConfig q_phy;
};

/// Records collected at one fixed translation.
struct TranslationSet {
    double q1 = 0.0;
    std::uint64_t seed = 0;
    std::vector<TrajectoryRecord> records;
};

/// A dataset partitioned by translation, plus provenance.
struct Dataset {
    std::vector<TranslationSet> parts;
    std::uint64_t seed = 0;
    std::string plant_hash;
    std::string split = "train";

    std::size_t size() const;
    std::vector<TrajectoryRecord> flatten() const;
};

/// Per-joint error statistics of q_phy - q_cmd.
///
/// mae / mae_sd: mean and SD of |e|; mse / mse_sd: mean and SD of the signed e
/// (the signed mean is what the hysteresis tables call MSE).
struct ErrorStats {
    Vector7 mae = Vector7::Zero();
    Vector7 mae_sd = Vector7::Zero();
    Vector7 mse = Vector7::Zero();
    Vector7 mse_sd = Vector7::Zero();
    std::size_t count = 0;
};

/// Sampling ranges for random data trajectories: q2 in [-30, 30],
/// q3..q5 in [-60, 60], q6 = q7 = 0. q1 is set per trajectory.
JointLimits default_data_ranges();

/// Uniform random waypoints, linearly interpolated so no joint moves more than
/// interp_step per sample. Starts at the home pose (angles zero) at the given q1.
std::vector<JointConfig> gen_random_trajectory(const JointLimits& ranges, int n_waypoints, double interp_step,
                                               double q1, std::uint64_t seed);

/// Linear interpolation from a to b (exclusive of a, inclusive of b) with at
/// most max_step per sample on every angle (and on q1, in mm).
std::vector<JointConfig> interpolate(const JointConfig& a, const JointConfig& b, double max_step);

/// Runs one random trajectory per q1 value through a freshly reset plant.
Dataset collect_dataset(const std::vector<double>& q1_values, std::size_t n_per, const PlantParams& plant,
                        std::uint64_t seed, const JointLimits& ranges = default_data_ranges(),
                        double interp_step = 3.0);

/// Throws DomainError on an empty record list.
ErrorStats error_stats(const std::vector<TrajectoryRecord>& records);

/// Statistics of desired vs. achieved sequences of equal length.
ErrorStats error_stats(const std::vector<JointConfig>& target, const std::vector<JointConfig>& achieved);

/// Cycle-to-cycle repeatability of one joint: the command sweeps
/// 0 -> +amplitude -> -amplitude -> 0 in interp_step increments, `cycles` times
/// from reset, at a fixed q1. Returns the MAE of the joint's q_phy between
/// consecutive cycles, averaged over cycle pairs after the first cycle.
double loop_repeatability(const PlantParams& plant, int joint, double amplitude, int cycles, double q1,
                          double interp_step = 3.0);

/// Supervision windows for the inverse model: input q_phy[t-L+1 .. t],
/// target q_cmd[t], both normalized. Steps before the start of a trajectory are
/// normalized zeros, as in the controller.
WindowSet make_windows(const std::vector<TrajectoryRecord>& trajectory, int L, const Normalizer& norm);

/// Windows of every translation set, concatenated in order.
WindowSet make_windows(const Dataset& ds, int L, const Normalizer& norm);

/// Windows of input sequence -> target sequence (equal length).
WindowSet make_windows(const std::vector<JointConfig>& inputs, const std::vector<JointConfig>& targets, int L,
                       const Normalizer& norm);

/// Concatenates window sets of equal L.
WindowSet concat(const std::vector<WindowSet>& sets);

/// Deterministic sub-seed derivation (splitmix64 of seed and stream id).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Short stable hash of the plant parameters (hex), used in dataset sidecars.
std::string plant_hash(const PlantParams& params);

}  // namespace samkit
