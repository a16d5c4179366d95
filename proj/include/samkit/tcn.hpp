#pragma once

#include "samkit/types.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace samkit {

/// Residual blocks needed for a receptive field covering L steps with kernel k:
/// the smallest n >= 1 with (2k - 2) * 2^(n-1) >= L - 1, i.e.
/// ceil(log2((L-1)/(2k-2)) + 1) clamped to at least one block.
int num_blocks(int L, int k);

struct TcnConfig {
    int L = 10;
    int k = 3;
    int dilation_base = 2;
    int channels_in = 7;
    int channels_hidden = 64;
    int channels_out = 7;
    std::uint64_t seed = 1;

    int blocks() const { return num_blocks(L, k); }
    int dilation(int block) const;
    /// 1 + 2 (k - 1) sum_i dilation(i).
    int receptive_field() const;
    void validate() const;
    bool operator==(const TcnConfig&) const = default;
};

/// Affine map between joint units and the [-1, 1] range of the model.
struct Normalizer {
    Vector7 center = Vector7::Zero();
    Vector7 half_range = Vector7::Ones();

    static Normalizer from_limits(const JointLimits& lim);
    Vector7 normalize(const Vector7& q) const { return (q - center).cwiseQuotient(half_range); }
    Vector7 denormalize(const Vector7& x) const { return x.cwiseProduct(half_range) + center; }
    bool operator==(const Normalizer& o) const { return center == o.center && half_range == o.half_range; }
};

/// Dilated causal convolution with weight normalization, w_o = g_o v_o / |v_o|.
///
/// v is cout x (k * cin); column block j holds the tap applied to x[t - (k-1-j) d].
template <typename Scalar>
struct WnConv {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    int cin = 0, cout = 0, k = 0, dilation = 1;
    Mat v, g, b;  // g and b are cout x 1

    Mat weight() const {
        Mat w = v;
        for (int o = 0; o < cout; ++o) {
            const Scalar n = v.row(o).norm();
            w.row(o) *= n > Scalar(0) ? g(o, 0) / n : Scalar(0);
        }
        return w;
    }
};

template <typename Scalar>
struct ResidualBlock {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    WnConv<Scalar> conv1, conv2;
    bool has_proj = false;
    Mat proj_w, proj_b;  // 1x1 projection of the block input when channel counts differ
};

/// Per-block activations kept for the backward pass.
template <typename Scalar>
struct BlockCache {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat x, col1, h1_pre, col2, h2_pre, w1, w2;
};

/// Temporal convolutional network: n residual blocks, each
/// y = ReLU(WN-conv2(ReLU(WN-conv1(x)))) + (x or P x + c). Block i uses
/// dilation base^(i-1); the last block emits channels_out. The estimate is the
/// feature vector at the last time step.
///
/// Activations are channels x (batch * L) with each sample's L steps contiguous.
template <typename Scalar>
class TcnModel {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    TcnModel() = default;

    /// Deterministic initialization from cfg.seed: v ~ N(0, 0.01), g = |v|,
    /// biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), projections ~ N(0, 0.01).
    explicit TcnModel(const TcnConfig& cfg, const Normalizer& norm = {}) : cfg_(cfg), norm_(norm) {
        cfg_.validate();
        std::mt19937_64 rng(cfg_.seed);
        std::normal_distribution<double> gauss(0.0, 0.01);
        auto init_conv = [&](WnConv<Scalar>& c, int cin, int cout, int dilation) {
            c.cin = cin;
            c.cout = cout;
            c.k = cfg_.k;
            c.dilation = dilation;
            c.v.resize(cout, cfg_.k * cin);
            for (Eigen::Index i = 0; i < c.v.size(); ++i) c.v.data()[i] = static_cast<Scalar>(gauss(rng));
            c.g.resize(cout, 1);
            for (int o = 0; o < cout; ++o) c.g(o, 0) = c.v.row(o).norm();
            const double bound = 1.0 / std::sqrt(static_cast<double>(cfg_.k * cin));
            std::uniform_real_distribution<double> ub(-bound, bound);
            c.b.resize(cout, 1);
            for (int o = 0; o < cout; ++o) c.b(o, 0) = static_cast<Scalar>(ub(rng));
        };
        const int n = cfg_.blocks();
        blocks_.resize(n);
        for (int i = 0; i < n; ++i) {
            const int cin = i == 0 ? cfg_.channels_in : cfg_.channels_hidden;
            const int cout = i == n - 1 ? cfg_.channels_out : cfg_.channels_hidden;
            auto& blk = blocks_[i];
            init_conv(blk.conv1, cin, cout, cfg_.dilation(i));
            init_conv(blk.conv2, cout, cout, cfg_.dilation(i));
            blk.has_proj = cin != cout;
            if (blk.has_proj) {
                blk.proj_w.resize(cout, cin);
                for (Eigen::Index j = 0; j < blk.proj_w.size(); ++j)
                    blk.proj_w.data()[j] = static_cast<Scalar>(gauss(rng));
                blk.proj_b = Mat::Zero(cout, 1);
            }
        }
    }

    const TcnConfig& config() const { return cfg_; }
    const Normalizer& normalizer() const { return norm_; }
    void set_normalizer(const Normalizer& n) { norm_ = n; }
    /// Translations (q1, mm) present in the training data; empty if unknown.
    const std::vector<double>& trained_q1() const { return trained_q1_; }
    void set_trained_q1(std::vector<double> v) { trained_q1_ = std::move(v); }
    std::vector<ResidualBlock<Scalar>>& blocks() { return blocks_; }
    const std::vector<ResidualBlock<Scalar>>& blocks() const { return blocks_; }

    /// Parameter arrays in checkpoint order: per block conv1 (v, g, b),
    /// conv2 (v, g, b), then proj (w, b) if present.
    std::vector<Mat*> parameters() {
        std::vector<Mat*> out;
        for (auto& blk : blocks_) {
            for (auto* c : {&blk.conv1, &blk.conv2}) {
                out.push_back(&c->v);
                out.push_back(&c->g);
                out.push_back(&c->b);
            }
            if (blk.has_proj) {
                out.push_back(&blk.proj_w);
                out.push_back(&blk.proj_b);
            }
        }
        return out;
    }
    std::vector<const Mat*> parameters() const {
        auto ptrs = const_cast<TcnModel*>(this)->parameters();
        return {ptrs.begin(), ptrs.end()};
    }
    std::vector<std::string> parameter_names() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            for (const char* c : {"conv1", "conv2"})
                for (const char* p : {"v", "g", "b"}) out.push_back(fmt::format("block{}.{}.{}", i, c, p));
            if (blocks_[i].has_proj) {
                out.push_back(fmt::format("block{}.proj.w", i));
                out.push_back(fmt::format("block{}.proj.b", i));
            }
        }
        return out;
    }
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const Mat* p : parameters()) n += static_cast<std::size_t>(p->size());
        return n;
    }

    /// Same shapes, all zeros (gradient / optimizer buffers).
    TcnModel zeros_like() const {
        TcnModel z = *this;
        for (Mat* p : z.parameters()) p->setZero();
        return z;
    }

    /// Forward over a batch; x is channels_in x (batch * L). Returns features
    /// channels_out x (batch * L). Fills cache when given.
    Mat forward(const Mat& x, int batch, std::vector<BlockCache<Scalar>>* cache = nullptr) const {
        const int L = cfg_.L;
        if (x.rows() != cfg_.channels_in || x.cols() != static_cast<Eigen::Index>(batch) * L)
            throw DomainError(fmt::format("tcn forward: expected {} x {}, got {} x {}", cfg_.channels_in,
                                          batch * L, x.rows(), x.cols()));
        if (cache) cache->resize(blocks_.size());
        Mat cur = x;
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            const auto& blk = blocks_[i];
            BlockCache<Scalar> local;
            BlockCache<Scalar>& c = cache ? (*cache)[i] : local;
            c.w1 = blk.conv1.weight();
            c.w2 = blk.conv2.weight();
            im2col(cur, blk.conv1.k, blk.conv1.dilation, batch, c.col1);
            c.h1_pre.noalias() = c.w1 * c.col1;
            c.h1_pre.colwise() += blk.conv1.b.col(0);
            const Mat h1 = c.h1_pre.cwiseMax(Scalar(0));
            im2col(h1, blk.conv2.k, blk.conv2.dilation, batch, c.col2);
            c.h2_pre.noalias() = c.w2 * c.col2;
            c.h2_pre.colwise() += blk.conv2.b.col(0);
            Mat y = c.h2_pre.cwiseMax(Scalar(0));
            if (blk.has_proj) {
                y.noalias() += blk.proj_w * cur;
                y.colwise() += blk.proj_b.col(0);
            } else {
                y += cur;
            }
            if (cache) c.x = std::move(cur);
            cur = std::move(y);
        }
        return cur;
    }

    /// Estimates (last time step of each sample), channels_out x batch.
    Mat estimate(const Mat& x, int batch) const {
        const Mat f = forward(x, batch);
        Mat out(cfg_.channels_out, batch);
        for (int b = 0; b < batch; ++b) out.col(b) = f.col(static_cast<Eigen::Index>(b) * cfg_.L + cfg_.L - 1);
        return out;
    }

    /// Backpropagates d(loss)/d(features) into grad (same shapes as *this,
    /// accumulated). Returns d(loss)/d(input).
    Mat backward(const Mat& dfeat, int batch, const std::vector<BlockCache<Scalar>>& cache, TcnModel& grad) const {
        Mat dy = dfeat;
        for (int i = static_cast<int>(blocks_.size()) - 1; i >= 0; --i) {
            const auto& blk = blocks_[i];
            auto& gb = grad.blocks_[i];
            const auto& c = cache[i];

            Mat dx;
            if (blk.has_proj) {
                gb.proj_w.noalias() += dy * c.x.transpose();
                gb.proj_b.col(0) += dy.rowwise().sum();
                dx.noalias() = blk.proj_w.transpose() * dy;
            } else {
                dx = dy;
            }

            Mat dh2 = (c.h2_pre.array() > Scalar(0)).select(dy, Scalar(0));
            Mat dw2;
            dw2.noalias() = dh2 * c.col2.transpose();
            gb.conv2.b.col(0) += dh2.rowwise().sum();
            accumulate_weight_norm(blk.conv2, dw2, gb.conv2);
            Mat dcol2;
            dcol2.noalias() = c.w2.transpose() * dh2;
            Mat dh1 = col2im(dcol2, blk.conv2.cin, blk.conv2.k, blk.conv2.dilation, batch);

            dh1 = (c.h1_pre.array() > Scalar(0)).select(dh1, Scalar(0));
            Mat dw1;
            dw1.noalias() = dh1 * c.col1.transpose();
            gb.conv1.b.col(0) += dh1.rowwise().sum();
            accumulate_weight_norm(blk.conv1, dw1, gb.conv1);
            Mat dcol1;
            dcol1.noalias() = c.w1.transpose() * dh1;
            dx += col2im(dcol1, blk.conv1.cin, blk.conv1.k, blk.conv1.dilation, batch);
            dy = std::move(dx);
        }
        return dy;
    }

private:
    // col block j (rows j*C .. j*C+C-1) holds x shifted right by (k-1-j)*d within each sample.
    void im2col(const Mat& x, int k, int d, int batch, Mat& col) const {
        const int L = cfg_.L;
        const Eigen::Index C = x.rows();
        col.setZero(k * C, x.cols());
        for (int j = 0; j < k; ++j) {
            const int shift = (k - 1 - j) * d;
            if (shift >= L) continue;
            for (int b = 0; b < batch; ++b) {
                const Eigen::Index base = static_cast<Eigen::Index>(b) * L;
                col.block(j * C, base + shift, C, L - shift) = x.block(0, base, C, L - shift);
            }
        }
    }

    Mat col2im(const Mat& dcol, int C, int k, int d, int batch) const {
        const int L = cfg_.L;
        Mat dx = Mat::Zero(C, dcol.cols());
        for (int j = 0; j < k; ++j) {
            const int shift = (k - 1 - j) * d;
            if (shift >= L) continue;
            for (int b = 0; b < batch; ++b) {
                const Eigen::Index base = static_cast<Eigen::Index>(b) * L;
                dx.block(0, base, C, L - shift) += dcol.block(j * C, base + shift, C, L - shift);
            }
        }
        return dx;
    }

    // dv = (g/|v|) (dw - (dw . vhat) vhat), dg = dw . vhat per output filter.
    static void accumulate_weight_norm(const WnConv<Scalar>& conv, const Mat& dw, WnConv<Scalar>& grad) {
        for (int o = 0; o < conv.cout; ++o) {
            const Scalar norm = conv.v.row(o).norm();
            if (!(norm > Scalar(0))) continue;
            const auto vhat = conv.v.row(o) / norm;
            const Scalar proj = dw.row(o).dot(vhat);
            grad.g(o, 0) += proj;
            grad.v.row(o) += (conv.g(o, 0) / norm) * (dw.row(o) - proj * vhat);
        }
    }

    TcnConfig cfg_;
    Normalizer norm_;
    std::vector<double> trained_q1_;
    std::vector<ResidualBlock<Scalar>> blocks_;
};

/// Mean squared error over the last-step estimates and its gradient with
/// respect to the full feature map.
template <typename Scalar>
Scalar last_step_mse(const TcnModel<Scalar>& model, const typename TcnModel<Scalar>::Mat& features,
                     const typename TcnModel<Scalar>::Mat& target, int batch,
                     typename TcnModel<Scalar>::Mat* dfeatures) {
    const int L = model.config().L;
    const int C = model.config().channels_out;
    const Scalar denom = static_cast<Scalar>(C) * batch;
    Scalar loss = 0;
    if (dfeatures) dfeatures->setZero(features.rows(), features.cols());
    for (int b = 0; b < batch; ++b) {
        const Eigen::Index col = static_cast<Eigen::Index>(b) * L + L - 1;
        const auto diff = (features.col(col) - target.col(b)).eval();
        loss += diff.squaredNorm();
        if (dfeatures) dfeatures->col(col) = (Scalar(2) / denom) * diff;
    }
    return loss / denom;
}

/// Loss and gradient of last_step_mse for one batch. Used by training and the
/// gradient check.
template <typename Scalar>
Scalar loss_and_gradient(const TcnModel<Scalar>& model, const typename TcnModel<Scalar>::Mat& x,
                         const typename TcnModel<Scalar>::Mat& target, int batch, TcnModel<Scalar>& grad) {
    std::vector<BlockCache<Scalar>> cache;
    const auto feat = model.forward(x, batch, &cache);
    typename TcnModel<Scalar>::Mat dfeat;
    const Scalar loss = last_step_mse(model, feat, target, batch, &dfeat);
    model.backward(dfeat, batch, cache, grad);
    return loss;
}

/// Windowed supervision pairs in normalized units: inputs channels_in x (N * L),
/// targets channels_out x N.
struct WindowSet {
    Eigen::MatrixXf inputs;
    Eigen::MatrixXf targets;
    int L = 0;
    int size() const { return static_cast<int>(targets.cols()); }
};

struct TrainOptions {
    double lr = 1e-3;
    int epochs = 1500;
    int batch = 256;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int eval_every = 1;  ///< validation cadence in epochs (the last epoch is always evaluated)
    int patience = 0;    ///< stop after this many epochs without a new best validation loss (0: never)
    std::function<void(int epoch, double train_mse, double valid_mse)> on_epoch;
};

struct TrainResult {
    TcnModel<float> best;
    TcnModel<float> last;
    int best_epoch = -1;
    double best_valid = 0.0;
    double last_valid = 0.0;
    std::vector<double> train_curve, valid_curve;  ///< normalized-unit MSE per evaluated epoch
    std::vector<int> epochs;
    bool stopped_early = false;
};

/// Adam on normalized-unit MSE; returns the checkpoint with the lowest
/// validation loss. Mini-batch order comes from cfg.seed, so a run is fully
/// determined by (cfg, data, options). Throws NumericalError on a non-finite loss.
TrainResult train_tcn(const TcnConfig& cfg, const Normalizer& norm, const WindowSet& train, const WindowSet& valid,
                      const TrainOptions& opts);

/// Mean normalized-unit MSE of a model over a window set (evaluated in chunks).
double evaluate_mse(const TcnModel<float>& model, const WindowSet& set);

/// Estimates in joint units for every window, 7 x N.
Eigen::MatrixXd predict(const TcnModel<float>& model, const WindowSet& set);

/// Parameter-wise conversion (e.g. float training model to double for checks).
template <typename To, typename From>
TcnModel<To> cast_model(const TcnModel<From>& src) {
    TcnModel<To> dst(src.config(), src.normalizer());
    dst.set_trained_q1(src.trained_q1());
    auto d = dst.parameters();
    auto s = src.parameters();
    for (std::size_t i = 0; i < d.size(); ++i) *d[i] = s[i]->template cast<To>();
    return dst;
}

}  // namespace samkit
