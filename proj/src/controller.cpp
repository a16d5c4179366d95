#include "samkit/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <numeric>

namespace samkit {

std::uint64_t model_id(const TcnModel<float>& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto* p : model.parameters()) {
        const auto* bytes = reinterpret_cast<const unsigned char*>(p->data());
        for (std::size_t i = 0; i < static_cast<std::size_t>(p->size()) * sizeof(float); ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

CompensationController::CompensationController(std::vector<TcnModel<float>> models, bool clamp_to_limits,
                                               const JointLimits& limits)
    : models_(std::move(models)), clamp_(clamp_to_limits), limits_(limits) {
    if (models_.empty()) throw ConfigError("controller: no models");
    // Members differ only in their initialization seed.
    auto shape = [](TcnConfig c) {
        c.seed = 0;
        return c;
    };
    const TcnConfig cfg = models_.front().config();
    for (const auto& m : models_) {
        if (!(shape(m.config()) == shape(cfg)) || !(m.normalizer() == models_.front().normalizer()))
            throw ConfigError("controller: models differ in configuration or normalization");
    }
    if (cfg.channels_in != kNumJoints || cfg.channels_out != kNumJoints)
        throw ConfigError("controller: models must map 7 joints to 7 joints");
    std::vector<std::pair<std::uint64_t, std::size_t>> ids;
    for (std::size_t i = 0; i < models_.size(); ++i) ids.emplace_back(model_id(models_[i]), i);
    std::sort(ids.begin(), ids.end());
    std::vector<TcnModel<float>> sorted;
    for (const auto& [id, i] : ids) sorted.push_back(models_[i]);
    models_ = std::move(sorted);
    norm_ = models_.front().normalizer();
    L_ = cfg.L;
    reset();
}

void CompensationController::reset() {
    ring_ = Eigen::MatrixXf::Zero(kNumJoints, L_);
    head_ = 0;
    count_ = 0;
}

Eigen::MatrixXf CompensationController::window() const {
    Eigen::MatrixXf w = Eigen::MatrixXf::Zero(kNumJoints, L_);
    const std::size_t n = std::min<std::size_t>(count_, L_);
    // head_ is the slot the next frame goes to; the newest frame sits just before it.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t slot = (head_ + L_ - n + i) % L_;
        w.col(L_ - n + i) = ring_.col(slot);
    }
    return w;
}

JointConfig CompensationController::compensate(const JointConfig& q_desired) {
    ring_.col(head_) = norm_.normalize(q_desired.values).cast<float>();
    head_ = (head_ + 1) % L_;
    ++count_;
    scratch_ = window();
    Vector7 sum = Vector7::Zero();
    for (const auto& m : models_) sum += m.estimate(scratch_, 1).col(0).cast<double>();
    JointConfig out(norm_.denormalize(sum / static_cast<double>(models_.size())));
    if (clamp_) out.values = out.values.cwiseMax(limits_.lower).cwiseMin(limits_.upper);
    return out;
}

std::vector<double> CompensationController::trained_q1() const {
    std::vector<double> out;
    for (const auto& m : models_) out.insert(out.end(), m.trained_q1().begin(), m.trained_q1().end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

LatencyStats CompensationController::latency_probe(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("latency_probe: need at least one sample");
    const Eigen::MatrixXf saved_ring = ring_;
    const std::size_t saved_head = head_, saved_count = count_;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> us(n);
    for (std::size_t i = 0; i < n; ++i) {
        JointConfig q;
        for (int j = 0; j < kNumJoints; ++j) q[j] = limits_.center(j) + u(rng) * limits_.half_range(j);
        const auto t0 = std::chrono::steady_clock::now();
        const JointConfig out = compensate(q);
        const auto t1 = std::chrono::steady_clock::now();
        if (!std::isfinite(out[0])) throw NumericalError("latency_probe: non-finite output");
        us[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();
    }
    ring_ = saved_ring;
    head_ = saved_head;
    count_ = saved_count;
    std::sort(us.begin(), us.end());
    // Nearest-rank percentile.
    auto pct = [&](double p) {
        const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
        return us[std::clamp<std::size_t>(rank, 1, n) - 1];
    };
    return {pct(0.50), pct(0.99), us.back(), n};
}

TcnModel<float> identity_model(const TcnConfig& cfg, const Normalizer& norm) {
    if (cfg.channels_in != cfg.channels_out || cfg.channels_hidden < cfg.channels_in)
        throw DomainError("identity_model: needs channels_in == channels_out <= channels_hidden");
    TcnModel<float> m(cfg, norm);
    for (auto& blk : m.blocks()) {
        for (auto* c : {&blk.conv1, &blk.conv2}) {
            c->g.setZero();
            c->b.setZero();
        }
        if (blk.has_proj) {
            blk.proj_w.setZero();
            for (Eigen::Index i = 0; i < std::min(blk.proj_w.rows(), blk.proj_w.cols()); ++i) blk.proj_w(i, i) = 1.0f;
            blk.proj_b.setZero();
        }
    }
    return m;
}

}  // namespace samkit
