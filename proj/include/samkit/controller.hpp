#pragma once

#include "samkit/tcn.hpp"

#include <cstdint>
#include <vector>

namespace samkit {

struct LatencyStats {
    double p50_us = 0.0;
    double p99_us = 0.0;
    double max_us = 0.0;
    std::size_t samples = 0;
};

/// Feedforward hysteresis compensation with an ensemble of inverse models.
///
/// Each call pushes the desired configuration into a history of the last L
/// steps (earlier slots are normalized zeros), evaluates every model on that
/// window and returns the mean estimate. Models are ordered by a hash of their
/// parameters so the summation order does not depend on how they were passed.
class CompensationController {
public:
    /// Throws ConfigError if models is empty or their configs/normalizers differ.
    explicit CompensationController(std::vector<TcnModel<float>> models, bool clamp_to_limits = false,
                                    const JointLimits& limits = {});

    JointConfig compensate(const JointConfig& q_desired);
    void reset();

    /// Current padded window in normalized units, 7 x L, oldest column first.
    Eigen::MatrixXf window() const;
    std::size_t history_size() const { return count_; }
    int sequence_length() const { return L_; }
    std::size_t model_count() const { return models_.size(); }
    /// Union of the models' training translations.
    std::vector<double> trained_q1() const;

    /// Times n compensate() calls on random in-limit desired configurations;
    /// the history is restored afterwards. Throws DomainError for n = 0.
    LatencyStats latency_probe(std::size_t n, std::uint64_t seed = 3);

private:
    std::vector<TcnModel<float>> models_;
    Normalizer norm_;
    int L_ = 0;
    Eigen::MatrixXf ring_;  // 7 x L, column (head_ + i) % L is the i-th oldest once full
    std::size_t head_ = 0, count_ = 0;
    bool clamp_ = false;
    JointLimits limits_;
    Eigen::MatrixXf scratch_;
};

/// The baseline: desired joints go to the actuators unchanged.
inline JointConfig uncalibrated_pass(const JointConfig& q_desired) { return q_desired; }

/// Stable hash of a model's parameter bytes (orders ensembles).
std::uint64_t model_id(const TcnModel<float>& model);

/// Network whose estimate equals its last input frame exactly: zero conv
/// magnitudes and biases, identity embeddings in the projections. Requires
/// channels_hidden >= channels_in == channels_out.
TcnModel<float> identity_model(const TcnConfig& cfg, const Normalizer& norm);

}  // namespace samkit
