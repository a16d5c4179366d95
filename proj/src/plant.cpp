#include "samkit/plant.hpp"

#include <algorithm>
#include <cmath>

namespace samkit {

namespace {

constexpr double kMaxBoucWenSubstep = 0.25;  // deg

double dead_band(double x, double half_width) {
    if (half_width <= 0.0) return x;
    if (x > half_width) return x - half_width;
    if (x < -half_width) return x + half_width;
    return 0.0;
}

// Explicit Bouc-Wen update with A = 1, sub-stepped in the input increment.
double bouc_wen(double z, double du, double beta, double gamma, double n) {
    const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(du) / kMaxBoucWenSubstep)));
    const double h = du / substeps;
    for (int k = 0; k < substeps; ++k) {
        const double az = std::abs(z);
        const double azn = std::pow(az, n);
        const double azn1 = (n == 1.0) ? 1.0 : std::pow(az, n - 1.0);
        z += h - beta * std::abs(h) * azn1 * z - gamma * h * azn;
    }
    return z;
}

}  // namespace

PlantParams PlantParams::calibrated_default() {
    PlantParams p;
    p.deadzone_halfwidth << 0, 1.0, 0, 2.0, 2.0, 0, 0;
    p.backlash_width << 0.2, 20.0, 20.0, 26.0, 22.0, 6.0, 0;
    p.bw_alpha << 0, 0.2, 0.3, 0.3, 0.2, 0, 0;
    p.bias_gain = 17.5;
    p.bias_span = 60.0;
    p.trans_gain_slope = 0.032;
    p.coupling(5, 2) = -1.4;
    p.coupling_saturation = 24.0;
    return p;
}

void PlantParams::validate() const {
    if ((deadzone_halfwidth.array() < 0).any() || (backlash_width.array() < 0).any())
        throw DomainError("plant: dead-band and backlash widths must be non-negative");
    if ((bw_n.array() < 1).any()) throw DomainError("plant: Bouc-Wen exponent n must be >= 1");
    if (trans_gain_slope < 0.0) throw DomainError("plant: trans_gain_slope must be non-negative");
    if (!(bias_span > 0.0)) throw DomainError("plant: bias_span must be positive");
    if (coupling.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw DomainError("plant: coupling matrix must have a zero diagonal");
    if (coupling_saturation < 0.0) throw DomainError("plant: coupling_saturation must be non-negative");
    if (noise_sd < 0.0) throw DomainError("plant: noise_sd must be non-negative");
}

JointConfig plant_step(PlantState& state, const JointConfig& q_cmd, const PlantParams& params,
                       std::mt19937_64* rng) {
    const double q1 = q_cmd[0];
    Vector7 error;
    for (int j = 0; j < kNumJoints; ++j) {
        const double x = q_cmd[j];
        const double g = params.gain(j, q1);
        const double u = dead_band(x, params.deadzone_halfwidth[j] * g);
        const double r = 0.5 * params.backlash_width[j] * g;
        state.play[j] = std::clamp(state.play[j], u - r, u + r);
        state.z[j] = bouc_wen(state.z[j], u - state.last_input[j], params.bw_beta[j], params.bw_gamma[j],
                              params.bw_n[j]);
        state.last_input[j] = u;
        error[j] = state.play[j] - x + params.bw_alpha[j] * g * state.z[j];
    }
    error[2] += params.bias_gain * params.gain(2, q1) * (1.0 + q_cmd[2] / params.bias_span);
    const Vector7 drive = params.coupling * error;
    if (params.coupling_saturation > 0.0) {
        const double b = 0.5 / params.coupling_saturation;
        for (int j = 0; j < kNumJoints; ++j) {
            if (params.coupling.row(j).isZero()) continue;
            state.coupled[j] = bouc_wen(state.coupled[j], drive[j] - state.coupled_drive[j], b, b, 1.0);
        }
        state.coupled_drive = drive;
        error += state.coupled;
    } else {
        error += drive;
    }

    JointConfig phy(q_cmd.values + error);
    if (rng && params.noise_sd > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_sd);
        for (int j = 1; j < 6; ++j) phy[j] += noise(*rng);
    }
    state.last_cmd = q_cmd;
    state.last_phy = phy;
    ++state.steps;
    return phy;
}

HysteresisPlant::HysteresisPlant(PlantParams params) : params_(std::move(params)), rng_(params_.noise_seed) {
    params_.validate();
}

JointConfig HysteresisPlant::step(const JointConfig& q_cmd) { return plant_step(state_, q_cmd, params_, &rng_); }

std::vector<JointConfig> HysteresisPlant::run(std::span<const JointConfig> commands) {
    std::vector<JointConfig> out;
    out.reserve(commands.size());
    for (const auto& q : commands) out.push_back(step(q));
    return out;
}

void HysteresisPlant::reset() {
    state_ = PlantState{};
    rng_.seed(params_.noise_seed);
}

}  // namespace samkit
