#include "samkit/tcn.hpp"

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace samkit {

int num_blocks(int L, int k) {
    if (L < 2 || k < 2) throw DomainError(fmt::format("num_blocks: need L >= 2 and k >= 2, got L={}, k={}", L, k));
    int n = 1;
    long long reach = 2LL * k - 2;
    while (reach < L - 1) {
        reach *= 2;
        ++n;
    }
    return n;
}

int TcnConfig::dilation(int block) const {
    int d = 1;
    for (int i = 0; i < block; ++i) d *= dilation_base;
    return d;
}

int TcnConfig::receptive_field() const {
    int rf = 1;
    for (int i = 0; i < blocks(); ++i) rf += 2 * (k - 1) * dilation(i);
    return rf;
}

void TcnConfig::validate() const {
    num_blocks(L, k);
    if (dilation_base < 1 || channels_in < 1 || channels_hidden < 1 || channels_out < 1)
        throw DomainError("tcn config: dilation base and channel counts must be positive");
}

Normalizer Normalizer::from_limits(const JointLimits& lim) {
    Normalizer n;
    for (int i = 0; i < kNumJoints; ++i) {
        n.center[i] = lim.center(i);
        n.half_range[i] = lim.half_range(i) > 0.0 ? lim.half_range(i) : 1.0;
    }
    return n;
}

namespace {

using MatF = Eigen::MatrixXf;

void gather(const WindowSet& set, const std::vector<int>& order, std::size_t first, int batch, MatF& x, MatF& y) {
    const int L = set.L;
    const Eigen::Index C = set.inputs.rows();
    x.resize(C, static_cast<Eigen::Index>(batch) * L);
    y.resize(set.targets.rows(), batch);
    for (int b = 0; b < batch; ++b) {
        const int idx = order[first + b];
        x.block(0, static_cast<Eigen::Index>(b) * L, C, L) = set.inputs.block(0, static_cast<Eigen::Index>(idx) * L, C, L);
        y.col(b) = set.targets.col(idx);
    }
}

}  // namespace

double evaluate_mse(const TcnModel<float>& model, const WindowSet& set) {
    if (set.size() == 0) throw DomainError("evaluate_mse: empty window set");
    constexpr int chunk = 1024;
    double total = 0.0;
    const int L = set.L;
    for (int start = 0; start < set.size(); start += chunk) {
        const int n = std::min(chunk, set.size() - start);
        const MatF x = set.inputs.middleCols(static_cast<Eigen::Index>(start) * L, static_cast<Eigen::Index>(n) * L);
        const MatF est = model.estimate(x, n);
        total += (est - set.targets.middleCols(start, n)).cast<double>().squaredNorm();
    }
    return total / (static_cast<double>(set.size()) * set.targets.rows());
}

Eigen::MatrixXd predict(const TcnModel<float>& model, const WindowSet& set) {
    Eigen::MatrixXd out(model.config().channels_out, set.size());
    constexpr int chunk = 1024;
    const int L = set.L;
    for (int start = 0; start < set.size(); start += chunk) {
        const int n = std::min(chunk, set.size() - start);
        const MatF x = set.inputs.middleCols(static_cast<Eigen::Index>(start) * L, static_cast<Eigen::Index>(n) * L);
        const Eigen::MatrixXd est = model.estimate(x, n).cast<double>();
        for (int i = 0; i < n; ++i) out.col(start + i) = model.normalizer().denormalize(est.col(i));
    }
    return out;
}

namespace {

// Batch temporaries are a few hundred KB each. With glibc's defaults every one
// becomes a fresh mmap and half the training time goes to page faults, so keep
// freed blocks on the heap instead.
void keep_freed_memory() {
#ifdef __GLIBC__
    static const bool once = [] {
        mallopt(M_MMAP_THRESHOLD, 64 << 20);
        mallopt(M_TRIM_THRESHOLD, 256 << 20);
        return true;
    }();
    (void)once;
#endif
}

}  // namespace

TrainResult train_tcn(const TcnConfig& cfg, const Normalizer& norm, const WindowSet& train, const WindowSet& valid,
                      const TrainOptions& opts) {
    if (train.L != cfg.L || valid.L != cfg.L) throw DomainError("train_tcn: window length does not match config");
    if (train.size() == 0 || valid.size() == 0) throw DomainError("train_tcn: empty training or validation set");
    if (opts.epochs < 1 || opts.batch < 1 || opts.eval_every < 1 || opts.patience < 0 || !(opts.lr > 0.0)) throw DomainError("train_tcn: invalid options");

    keep_freed_memory();
    TcnModel<float> model(cfg, norm);
    TcnModel<float> grad = model.zeros_like();
    TcnModel<float> m1 = model.zeros_like();
    TcnModel<float> m2 = model.zeros_like();
    auto params = model.parameters();
    auto grads = grad.parameters();
    auto mom1 = m1.parameters();
    auto mom2 = m2.parameters();

    TrainResult res;
    res.best_valid = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(cfg.seed ^ 0x7c15a9e3ULL);
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    const float b1 = static_cast<float>(opts.beta1), b2 = static_cast<float>(opts.beta2);
    const float eps = static_cast<float>(opts.eps), lr = static_cast<float>(opts.lr);
    long long step = 0;
    MatF x, y;
    for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        int seen = 0;
        for (std::size_t first = 0; first < order.size(); first += opts.batch) {
            const int batch = static_cast<int>(std::min<std::size_t>(opts.batch, order.size() - first));
            gather(train, order, first, batch, x, y);
            for (auto* g : grads) g->setZero();
            const float loss = loss_and_gradient(model, x, y, batch, grad);
            if (!std::isfinite(loss))
                throw NumericalError(fmt::format(
                    "train_tcn: non-finite loss at epoch {} step {} (lower the learning rate or check the data)",
                    epoch, step));
            epoch_loss += static_cast<double>(loss) * batch;
            seen += batch;
            ++step;
            const float c1 = 1.0f / (1.0f - std::pow(b1, static_cast<float>(step)));
            const float c2 = 1.0f / (1.0f - std::pow(b2, static_cast<float>(step)));
            for (std::size_t p = 0; p < params.size(); ++p) {
                mom1[p]->array() = b1 * mom1[p]->array() + (1.0f - b1) * grads[p]->array();
                mom2[p]->array() = b2 * mom2[p]->array() + (1.0f - b2) * grads[p]->array().square();
                params[p]->array() -=
                    lr * (mom1[p]->array() * c1) / ((mom2[p]->array() * c2).sqrt() + eps);
            }
        }
        const double train_mse = epoch_loss / seen;
        if (epoch % opts.eval_every == 0 || epoch == opts.epochs) {
            const double v = evaluate_mse(model, valid);
            res.train_curve.push_back(train_mse);
            res.valid_curve.push_back(v);
            res.epochs.push_back(epoch);
            if (v < res.best_valid) {
                res.best_valid = v;
                res.best_epoch = epoch;
                res.best = model;
            }
            res.last_valid = v;
            if (opts.on_epoch) opts.on_epoch(epoch, train_mse, v);
            if (opts.patience > 0 && epoch - res.best_epoch >= opts.patience) {
                res.stopped_early = true;
                break;
            }
        }
    }
    res.last = model;
    return res;
}

}  // namespace samkit
