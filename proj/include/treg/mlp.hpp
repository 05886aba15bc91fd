#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "treg/common.hpp"

namespace treg {

namespace nn_detail {

// Mean softmax cross-entropy over 2-class logits plus its gradient.
// Gradient rows are (softmax - onehot) / n.
inline std::pair<double, Mat> softmax_xent(const Mat& logits, const std::vector<int>& labels) {
    const long n = logits.rows();
    if (static_cast<long>(labels.size()) != n)
        fail("loss: ", labels.size(), " labels for ", n, " logit rows");
    Mat dlogits(n, logits.cols());
    double loss = 0.0;
    for (long i = 0; i < n; ++i) {
        if (labels[i] < 0 || labels[i] >= logits.cols())
            fail("loss: label ", labels[i], " out of range for ", logits.cols(), " classes");
        double zmax = logits.row(i).maxCoeff();
        Eigen::RowVectorXd shifted = logits.row(i).array() - zmax;
        Eigen::RowVectorXd expz = shifted.array().exp();
        double denom = expz.sum();
        loss += std::log(denom) - shifted[labels[i]];
        dlogits.row(i) = expz / denom;
        dlogits(i, labels[i]) -= 1.0;
    }
    dlogits /= static_cast<double>(n);
    return {loss / static_cast<double>(n), dlogits};
}

inline Mat init_uniform(long rows, long cols, long fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Mat w(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) w(i, j) = dist(rng);
    return w;
}

}  // namespace nn_detail

struct MlpConfig {
    std::vector<int> layer_dims;  // e.g. {m, 256, 128, 2}
    std::uint64_t seed = 0;
};

inline void validate(const MlpConfig& cfg) {
    if (cfg.layer_dims.size() < 2) fail("mlp: need at least input and output dims");
    if (cfg.layer_dims.back() != 2) fail("mlp: final dim must be 2 (binary logits)");
    for (int d : cfg.layer_dims)
        if (d < 1) fail("mlp: layer dims must be >= 1");
}

// Fully-connected stack with ReLU between hidden layers and a linear 2-logit
// head. Gradients are analytic; see the finite-difference checks in the tests.
class Mlp {
public:
    explicit Mlp(MlpConfig cfg) : cfg_(std::move(cfg)) {
        validate(cfg_);
        std::mt19937_64 rng(cfg_.seed);
        const auto& dims = cfg_.layer_dims;
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            weights_.push_back(nn_detail::init_uniform(dims[l], dims[l + 1], dims[l], rng));
            biases_.push_back(Mat::Zero(1, dims[l + 1]));
        }
    }

    const MlpConfig& config() const { return cfg_; }
    long input_dim() const { return cfg_.layer_dims.front(); }

    Mat forward(const Mat& X) const {
        check_input(X);
        Mat a = X;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            Mat z = (a * weights_[l]).rowwise() + biases_[l].row(0);
            if (!z.allFinite()) fail("mlp: non-finite activations at layer ", l);
            a = (l + 1 < weights_.size()) ? z.cwiseMax(0.0) : z;
        }
        return a;
    }

    double loss(const Mat& X, const std::vector<int>& y) const {
        return nn_detail::softmax_xent(forward(X), y).first;
    }

    std::pair<double, std::vector<Mat>> loss_grad(const Mat& X, const std::vector<int>& y) const {
        check_input(X);
        const std::size_t layers = weights_.size();
        std::vector<Mat> pre(layers);          // pre-activation per layer
        std::vector<Mat> act(layers + 1);      // act[0] = input
        act[0] = X;
        for (std::size_t l = 0; l < layers; ++l) {
            pre[l] = (act[l] * weights_[l]).rowwise() + biases_[l].row(0);
            if (!pre[l].allFinite()) fail("mlp: non-finite activations at layer ", l);
            act[l + 1] = (l + 1 < layers) ? pre[l].cwiseMax(0.0) : pre[l];
        }

        auto [loss, dz] = nn_detail::softmax_xent(act[layers], y);
        std::vector<Mat> grads(2 * layers);
        for (std::size_t l = layers; l-- > 0;) {
            grads[2 * l] = act[l].transpose() * dz;
            grads[2 * l + 1] = dz.colwise().sum();
            if (l > 0) {
                Mat da = dz * weights_[l].transpose();
                dz = da.array() * (pre[l - 1].array() > 0.0).cast<double>();
            }
        }
        return {loss, std::move(grads)};
    }

    std::vector<Mat*> params() {
        std::vector<Mat*> out;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            out.push_back(&weights_[l]);
            out.push_back(&biases_[l]);
        }
        return out;
    }

    std::vector<std::string> param_names() const {
        std::vector<std::string> out;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            out.push_back(msg("layer", l, ".weight"));
            out.push_back(msg("layer", l, ".bias"));
        }
        return out;
    }

private:
    void check_input(const Mat& X) const {
        if (X.cols() != cfg_.layer_dims.front())
            fail("mlp: input has ", X.cols(), " columns, expected ", cfg_.layer_dims.front());
    }

    MlpConfig cfg_;
    std::vector<Mat> weights_;
    std::vector<Mat> biases_;
};

}  // namespace treg
