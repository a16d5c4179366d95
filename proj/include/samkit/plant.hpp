#pragma once

#include "samkit/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace samkit {

using Matrix7 = Eigen::Matrix<double, 7, 7>;

/// Parameters of the synthetic hysteresis plant.
///
/// Per joint j the commanded value x passes through a static dead band
/// (half-width deadzone_halfwidth), a play operator (full width
/// backlash_width) and a Bouc-Wen term bw_alpha * z. Those widths and the
/// Bouc-Wen weight are multiplied by the translation gain
///   g_j(q1) = 1 + trans_gain_slope * trans_gain_weight_j * q1.
/// q3 also gets the pretension bias bias_gain * g * (1 + x / bias_span), which
/// is larger for positive commands. Finally the upstream errors leak into
/// other joints through the coupling matrix (zero diagonal), mainly into q6,
/// optionally through a saturating hysteresis element.
struct PlantParams {
    Vector7 deadzone_halfwidth = Vector7::Zero();
    Vector7 backlash_width = Vector7::Zero();
    Vector7 bw_alpha = Vector7::Zero();
    Vector7 bw_beta = Vector7::Constant(0.05);
    Vector7 bw_gamma = Vector7::Constant(0.05);
    Vector7 bw_n = Vector7::Ones();
    double bias_gain = 0.0;
    double bias_span = 60.0;
    double trans_gain_slope = 0.0;
    Vector7 trans_gain_weight = (Vector7() << 0, 0.5, 1, 1, 0.7, 0, 0).finished();
    Matrix7 coupling = Matrix7::Zero();
    /// 0: coupled errors add linearly. Otherwise each coupled sum drives a
    /// Bouc-Wen element whose output saturates at this magnitude.
    double coupling_saturation = 0.0;
    double noise_sd = 0.0;
    std::uint64_t noise_seed = 7;

    /// All-zero hysteresis: q_phy == q_cmd.
    static PlantParams identity() { return {}; }
    /// Calibrated profile shipped as plant.default.
    static PlantParams calibrated_default();

    double gain(int joint, double q1) const { return 1.0 + trans_gain_slope * trans_gain_weight[joint] * q1; }

    void validate() const;
};

/// Internal state of one plant instance.
struct PlantState {
    Vector7 z = Vector7::Zero();          ///< Bouc-Wen state per joint
    Vector7 play = Vector7::Zero();       ///< play-operator output per joint
    Vector7 last_input = Vector7::Zero(); ///< dead-band output at the previous step
    Vector7 coupled = Vector7::Zero();    ///< saturating coupling element state
    Vector7 coupled_drive = Vector7::Zero(); ///< coupled error sum at the previous step
    JointConfig last_cmd;
    JointConfig last_phy;
    std::uint64_t steps = 0;
};

/// One step of the plant: returns the physical joints for q_cmd and advances state.
/// Noise (if any) is drawn from rng.
JointConfig plant_step(PlantState& state, const JointConfig& q_cmd, const PlantParams& params,
                       std::mt19937_64* rng = nullptr);

/// Stateful wrapper owning state and noise stream; reset() restores the initial state.
class HysteresisPlant {
public:
    explicit HysteresisPlant(PlantParams params);

    JointConfig step(const JointConfig& q_cmd);
    std::vector<JointConfig> run(std::span<const JointConfig> commands);
    void reset();

    const PlantState& state() const { return state_; }
    void set_state(const PlantState& s) { state_ = s; }
    const PlantParams& params() const { return params_; }

private:
    PlantParams params_;
    PlantState state_;
    std::mt19937_64 rng_;
};

}  // namespace samkit
