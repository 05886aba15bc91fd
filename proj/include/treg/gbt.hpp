#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "treg/ensemble.hpp"

namespace treg {

struct GbtConfig {
    int n_trees = 50;
    int max_depth = 3;
    double learning_rate = 0.3;
    double lambda = 1.0;            // L2 regularizer on leaf weights
    double min_child_weight = 1.0;  // minimum hessian sum per child
    std::uint64_t seed = 0;         // exact greedy training is deterministic; kept for interface parity
};

inline void validate(const GbtConfig& cfg) {
    if (cfg.n_trees < 1) fail("gbt: n_trees must be >= 1");
    if (cfg.max_depth < 1) fail("gbt: max_depth must be >= 1");
    if (!(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0))
        fail("gbt: learning_rate must be in (0, 1]");
    if (cfg.lambda < 0.0) fail("gbt: lambda must be >= 0");
}

namespace gbt_detail {

struct WorkNode {
    int id = 0;
    int depth = 0;
    double grad_sum = 0.0;
    double hess_sum = 0.0;
    // best split found so far
    double gain = -std::numeric_limits<double>::infinity();
    int feature = -1;
    double threshold = 0.0;
};

inline double leaf_gain(double g, double h, double lambda) { return g * g / (h + lambda); }

}  // namespace gbt_detail

inline double predict_margin_row(const Tree& tree, const Mat& X, long row) {
    const Node* n = &tree.root();
    while (n->kind == NodeKind::Split)
        n = &tree.node(X(row, n->feature) < n->threshold ? n->left : n->right);
    return n->leaf_value;
}

inline Vec predict_margin(const Ensemble& ens, const Mat& X) {
    if (X.cols() != ens.num_features)
        fail("predict: batch has ", X.cols(), " columns, model expects ", ens.num_features);
    Vec margin = Vec::Zero(X.rows());
    for (const Tree& tree : ens.trees)
        for (long i = 0; i < X.rows(); ++i) margin[i] += predict_margin_row(tree, X, i);
    return margin;
}

inline Vec predict_proba(const Ensemble& ens, const Mat& X) {
    Vec margin = predict_margin(ens, X);
    for (long i = 0; i < margin.size(); ++i) margin[i] = sigmoid(margin[i]);
    return margin;
}

// Newton boosting with logistic loss: g = p - y, h = p (1 - p). Splits are
// exact greedy over midpoints of adjacent distinct feature values; leaf
// weights are -G/(H + lambda) scaled by the learning rate. Zero-gain splits
// are taken (gain >= 0), with ties broken toward the lowest feature index and
// threshold, so structured plateaus (XOR-like data) still grow trees.
// Pass round_losses to record the mean training loss after each round.
inline Ensemble train_gbt(const Mat& X, const std::vector<int>& y, const GbtConfig& cfg = {},
                          std::vector<double>* round_losses = nullptr) {
    validate(cfg);
    const long n = X.rows();
    const long m = X.cols();
    if (n < 2) fail("gbt: need at least 2 rows, got ", n);
    if (static_cast<long>(y.size()) != n)
        fail("gbt: ", y.size(), " labels for ", n, " rows");
    if (!X.allFinite()) fail("gbt: non-finite feature values");
    for (int label : y)
        if (label != 0 && label != 1) fail("gbt: labels must be 0/1, got ", label);

    // Global presort per feature; each node scan walks this order once.
    std::vector<std::vector<long>> sorted(m);
    for (long f = 0; f < m; ++f) {
        sorted[f].resize(n);
        std::iota(sorted[f].begin(), sorted[f].end(), 0L);
        std::stable_sort(sorted[f].begin(), sorted[f].end(),
                         [&](long a, long b) { return X(a, f) < X(b, f); });
    }

    Ensemble ens;
    ens.num_features = static_cast<int>(m);
    Vec margin = Vec::Zero(n);
    Vec grad(n), hess(n);

    for (int round = 0; round < cfg.n_trees; ++round) {
        for (long i = 0; i < n; ++i) {
            double p = sigmoid(margin[i]);
            grad[i] = p - y[i];
            hess[i] = p * (1.0 - p);
        }

        Tree tree;
        std::vector<long> node_of(n, 0);  // work-node index per row; -1 once in a leaf
        std::vector<gbt_detail::WorkNode> work(1);
        work[0].id = 0;
        work[0].grad_sum = grad.sum();
        work[0].hess_sum = hess.sum();
        int next_id = 1;

        std::vector<long> frontier{0};  // work indices still eligible to split
        while (!frontier.empty()) {
            // Scan every feature once per level, tracking per-node prefix sums.
            std::vector<double> run_g(work.size(), 0.0), run_h(work.size(), 0.0);
            std::vector<double> prev(work.size(), 0.0);
            std::vector<char> has_prev(work.size(), 0);
            std::vector<char> active(work.size(), 0);
            for (long w : frontier) active[w] = 1;

            for (long f = 0; f < m; ++f) {
                for (long w : frontier) {
                    run_g[w] = run_h[w] = 0.0;
                    has_prev[w] = 0;
                }
                for (long idx : sorted[f]) {
                    long w = node_of[idx];
                    if (w < 0 || !active[w]) continue;
                    double v = X(idx, f);
                    if (has_prev[w] && v > prev[w]) {
                        double thr = 0.5 * (prev[w] + v);
                        if (prev[w] < thr) {  // guard against midpoint collapsing left
                            gbt_detail::WorkNode& nd = work[w];
                            double gl = run_g[w], hl = run_h[w];
                            double gr = nd.grad_sum - gl, hr = nd.hess_sum - hl;
                            if (hl >= cfg.min_child_weight && hr >= cfg.min_child_weight) {
                                double gain = gbt_detail::leaf_gain(gl, hl, cfg.lambda) +
                                              gbt_detail::leaf_gain(gr, hr, cfg.lambda) -
                                              gbt_detail::leaf_gain(nd.grad_sum, nd.hess_sum,
                                                                    cfg.lambda);
                                if (gain > nd.gain) {
                                    nd.gain = gain;
                                    nd.feature = static_cast<int>(f);
                                    nd.threshold = thr;
                                }
                            }
                        }
                    }
                    run_g[w] += grad[idx];
                    run_h[w] += hess[idx];
                    prev[w] = v;
                    has_prev[w] = 1;
                }
            }

            // Materialize this level: split where the best gain is nonnegative.
            std::vector<long> next_frontier;
            std::vector<long> left_work(work.size(), -1), right_work(work.size(), -1);
            for (long w : frontier) {
                const gbt_detail::WorkNode nd = work[w];  // copy: push_back below reallocates
                if (nd.feature >= 0 && nd.gain >= 0.0) {
                    int left_id = next_id++;
                    int right_id = next_id++;
                    tree.nodes.push_back(
                        make_split(nd.id, nd.feature, nd.threshold, left_id, right_id, nd.depth));
                    gbt_detail::WorkNode left, right;
                    left.id = left_id;
                    right.id = right_id;
                    left.depth = right.depth = nd.depth + 1;
                    left_work[w] = static_cast<long>(work.size());
                    work.push_back(left);
                    right_work[w] = static_cast<long>(work.size());
                    work.push_back(right);
                    if (nd.depth + 1 < cfg.max_depth) {
                        next_frontier.push_back(left_work[w]);
                        next_frontier.push_back(right_work[w]);
                    }
                } else {
                    double weight = -nd.grad_sum / (nd.hess_sum + cfg.lambda) * cfg.learning_rate;
                    tree.nodes.push_back(make_leaf(nd.id, weight, nd.depth));
                }
            }

            // Route rows into the new children and accumulate their stats.
            for (long i = 0; i < n; ++i) {
                long w = node_of[i];
                if (w < 0 || !active[w]) continue;
                const gbt_detail::WorkNode& nd = work[w];
                if (left_work[w] < 0) {
                    node_of[i] = -1;  // settled in a leaf
                    continue;
                }
                long child = X(i, nd.feature) < nd.threshold ? left_work[w] : right_work[w];
                node_of[i] = child;
                work[child].grad_sum += grad[i];
                work[child].hess_sum += hess[i];
            }

            // Depth-capped children become leaves immediately.
            std::vector<char> in_next(work.size(), 0);
            for (long w : next_frontier) in_next[w] = 1;
            for (long w : frontier) {
                for (long child : {left_work[w], right_work[w]}) {
                    if (child < 0 || in_next[child]) continue;
                    const gbt_detail::WorkNode& nd = work[child];
                    double weight =
                        -nd.grad_sum / (nd.hess_sum + cfg.lambda) * cfg.learning_rate;
                    tree.nodes.push_back(make_leaf(nd.id, weight, nd.depth));
                }
            }
            for (long i = 0; i < n; ++i) {
                long w = node_of[i];
                if (w >= 0 && !in_next[w]) node_of[i] = -1;
            }
            frontier = std::move(next_frontier);
        }

        tree.root_id = 0;
        sort_nodes(tree);
        for (long i = 0; i < n; ++i) margin[i] += predict_margin_row(tree, X, i);
        ens.trees.push_back(std::move(tree));

        if (round_losses) {
            double loss = 0.0;
            for (long i = 0; i < n; ++i) {
                double z = margin[i];
                // -log sigmoid(z) for y=1, -log sigmoid(-z) for y=0, stably
                loss += (y[i] ? 1.0 : 0.0) * (std::log1p(std::exp(-std::abs(z))) +
                                              std::max(-z, 0.0)) +
                        (y[i] ? 0.0 : 1.0) * (std::log1p(std::exp(-std::abs(z))) +
                                              std::max(z, 0.0));
            }
            round_losses->push_back(loss / static_cast<double>(n));
        }
    }

    validate_ensemble(ens);
    return ens;
}

}  // namespace treg
