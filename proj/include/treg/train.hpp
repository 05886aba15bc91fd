#pragma once

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "treg/adam.hpp"
#include "treg/common.hpp"
#include "treg/metrics.hpp"
#include "treg/mlp.hpp"

namespace treg {

struct TrainConfig {
    AdamConfig adam;
    int batch_size = 64;
    int patience = 10;
    double timeout_seconds = 600.0;
    int max_epochs = 200;
    std::uint64_t seed = 0;
};

inline void validate(const TrainConfig& cfg) {
    validate(cfg.adam);
    if (cfg.batch_size < 1) fail("train: batch_size must be >= 1");
    if (cfg.patience < 1) fail("train: patience must be >= 1");
    if (cfg.timeout_seconds < 0.0) fail("train: timeout must be >= 0");
    if (cfg.max_epochs < 1) fail("train: max_epochs must be >= 1");
}

struct EpochStats {
    int epoch = 0;          // 1-based
    double train_loss = 0;  // mean of minibatch losses
    double val_loss = 0;
    double val_auc = 0;     // NaN when the validation split has one class
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = 0;  // 1-based epoch whose weights the model ends with
    double best_val_loss = std::numeric_limits<double>::infinity();
    std::string stop_reason;  // "patience" | "timeout" | "max_epochs"
    double seconds = 0.0;
};

// Positive-class score per row: logit margin, monotone in softmax probability.
inline std::vector<double> logit_scores(const Mat& logits) {
    if (logits.cols() != 2) fail("scores: expected 2 logits per row, got ", logits.cols());
    std::vector<double> s(logits.rows());
    for (long i = 0; i < logits.rows(); ++i) s[i] = logits(i, 1) - logits(i, 0);
    return s;
}

// Minibatch Adam with early stopping on validation loss. The model is left
// holding the weights of its best validation epoch.
template <class Model>
TrainResult train(Model& model, const Mat& X_train, const std::vector<int>& y_train,
                  const Mat& X_val, const std::vector<int>& y_val, const TrainConfig& cfg) {
    validate(cfg);
    if (X_train.rows() < 1) fail("train: empty training set");
    if (X_val.rows() < 1) fail("train: empty validation set");
    if (static_cast<long>(y_train.size()) != X_train.rows())
        fail("train: ", y_train.size(), " train labels for ", X_train.rows(), " rows");
    if (static_cast<long>(y_val.size()) != X_val.rows())
        fail("train: ", y_val.size(), " val labels for ", X_val.rows(), " rows");

    auto params = model.params();
    AdamState opt;
    opt.init(params);
    std::mt19937_64 rng(cfg.seed);
    std::vector<long> order(X_train.rows());
    std::iota(order.begin(), order.end(), 0L);

    const bool val_two_class = [&] {
        bool pos = false, neg = false;
        for (int y : y_val) (y != 0 ? pos : neg) = true;
        return pos && neg;
    }();

    TrainResult res;
    std::vector<Mat> best;
    int bad_epochs = 0;
    const auto start = std::chrono::steady_clock::now();

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        long batches = 0;
        for (long at = 0; at < X_train.rows(); at += cfg.batch_size) {
            const long bs = std::min<long>(cfg.batch_size, X_train.rows() - at);
            Mat Xb(bs, X_train.cols());
            std::vector<int> yb(bs);
            for (long r = 0; r < bs; ++r) {
                Xb.row(r) = X_train.row(order[at + r]);
                yb[r] = y_train[order[at + r]];
            }
            auto [loss, grads] = model.loss_grad(Xb, yb);
            adam_step(params, grads, opt, cfg.adam);
            epoch_loss += loss;
            ++batches;
        }

        EpochStats st;
        st.epoch = epoch;
        st.train_loss = epoch_loss / static_cast<double>(batches);
        Mat val_logits = model.forward(X_val);
        st.val_loss = nn_detail::softmax_xent(val_logits, y_val).first;
        st.val_auc = val_two_class ? auc(logit_scores(val_logits), y_val)
                                   : std::numeric_limits<double>::quiet_NaN();
        res.history.push_back(st);

        if (st.val_loss < res.best_val_loss) {
            res.best_val_loss = st.val_loss;
            res.best_epoch = epoch;
            bad_epochs = 0;
            best.clear();
            for (const Mat* p : params) best.push_back(*p);
        } else {
            ++bad_epochs;
        }

        const double elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();
        if (bad_epochs >= cfg.patience) {
            res.stop_reason = "patience";
            break;
        }
        if (elapsed >= cfg.timeout_seconds) {
            res.stop_reason = "timeout";
            break;
        }
    }
    if (res.stop_reason.empty()) res.stop_reason = "max_epochs";

    if (!best.empty())
        for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best[i];
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace treg
