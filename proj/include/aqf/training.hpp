#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "aqf/errors.hpp"
#include "aqf/network.hpp"
#include "aqf/optimizer.hpp"
#include "aqf/preprocess.hpp"
#include "aqf/rng.hpp"

namespace aqf {

// Mean squared error over all elements, with its gradient 2(pred - truth)/N.
struct MseResult {
    double loss = 0.0;
    Eigen::MatrixXd grad;
};

inline MseResult mse_loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
    if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
        throw_data("ShapeMismatch", "prediction/target shapes differ");
    MseResult res;
    const Eigen::MatrixXd diff = predictions - targets;
    const double n = static_cast<double>(diff.size());
    res.loss = diff.squaredNorm() / n;
    res.grad = 2.0 * diff / n;
    return res;
}

struct TrainingConfig {
    int epochs = 20;
    int batch_size = 32;
    std::uint64_t seed = 0;       // drives shuffling only
    bool shuffle = false;         // temporal order by default
    double learning_rate = 1e-3;
    double clip_norm = 5.0;
};

struct EpochLog {
    int epoch = 0;           // 1-based
    double mean_loss = 0.0;  // mean per-sample MSE over the epoch, scaled units
    double seconds = 0.0;    // wall time; reporting only, never part of
                             // deterministic artifacts
    std::size_t clipped_batches = 0;
};

struct TrainingLog {
    std::vector<EpochLog> epochs;
    std::size_t steps_per_epoch = 0;
    std::size_t samples = 0;
};

// Mini-batch training in temporal order (optionally seeded shuffling).
// Deterministic: identical network/dataset/config produce bit-identical
// weights and losses. `progress` gets one human-readable line per epoch.
inline TrainingLog train(BiLstmNetwork& net, const WindowedDataset& data,
                         const TrainingConfig& cfg, std::ostream* progress = nullptr) {
    if (data.size() == 0) throw_data("EmptyDataset", "no training windows");
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw_usage("BadConfig", "epochs and batch size must be >= 1");

    const std::size_t n = data.size();
    TrainingLog log;
    log.samples = n;
    log.steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;

    AdamState adam;
    adam.learning_rate = cfg.learning_rate;
    adam.reset(net);

    NetworkGrads grads;
    grads.match(net);
    ForwardCaches caches;
    Rng shuffle_rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        if (cfg.shuffle) {
            for (std::size_t i = n - 1; i > 0; --i)
                std::swap(order[i], order[shuffle_rng.below(i + 1)]);
        }
        double loss_sum = 0.0;
        std::size_t clipped = 0;
        for (std::size_t batch_start = 0; batch_start < n;
             batch_start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t batch_n =
                std::min<std::size_t>(cfg.batch_size, n - batch_start);
            grads.set_zero();
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < batch_n; ++b) {
                const std::size_t idx = order[batch_start + b];
                const Eigen::Vector2d pred = network_forward(net, data.inputs[idx], caches);
                const Eigen::Vector2d target = data.targets.row(idx).transpose();
                const Eigen::Vector2d diff = pred - target;
                batch_loss += diff.squaredNorm() / 2.0;  // per-sample mean over 2 outputs
                // dL/dpred for the batch-mean objective
                const Eigen::Vector2d d_out =
                    2.0 * diff / (2.0 * static_cast<double>(batch_n));
                network_backward(net, caches, d_out, grads);
            }
            batch_loss /= static_cast<double>(batch_n);
            if (!std::isfinite(batch_loss))
                throw_numeric("NonFiniteLoss",
                              "loss diverged at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(batch_start / cfg.batch_size + 1));
            if (clip_by_global_norm(grads, cfg.clip_norm)) ++clipped;
            adam.step(net, grads);
            loss_sum += batch_loss * static_cast<double>(batch_n);
        }
        const auto stop = std::chrono::steady_clock::now();
        EpochLog e;
        e.epoch = epoch;
        e.mean_loss = loss_sum / static_cast<double>(n);
        e.seconds = std::chrono::duration<double>(stop - start).count();
        e.clipped_batches = clipped;
        log.epochs.push_back(e);
        if (progress) {
            char line[160];
            std::snprintf(line, sizeof(line), "Epoch %d/%d - %zu steps - %.1fs - loss: %.4e",
                          epoch, cfg.epochs, log.steps_per_epoch, e.seconds, e.mean_loss);
            *progress << line;
            if (clipped) *progress << " (clipped " << clipped << " batches)";
            *progress << '\n';
        }
    }
    return log;
}

}  // namespace aqf
