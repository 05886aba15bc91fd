#pragma once

#include <cmath>
#include <vector>

#include "treg/common.hpp"

namespace treg {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

inline void validate(const AdamConfig& cfg) {
    if (!(cfg.lr > 0.0)) fail("adam: lr must be > 0");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
        fail("adam: betas must be in [0, 1)");
}

// First/second moment accumulators mirroring the parameter list.
struct AdamState {
    std::vector<Mat> m;
    std::vector<Mat> v;
    long step = 0;

    void init(const std::vector<Mat*>& params) {
        m.clear();
        v.clear();
        for (const Mat* p : params) {
            m.push_back(Mat::Zero(p->rows(), p->cols()));
            v.push_back(Mat::Zero(p->rows(), p->cols()));
        }
        step = 0;
    }
};

inline void adam_step(const std::vector<Mat*>& params, const std::vector<Mat>& grads,
                      AdamState& state, const AdamConfig& cfg = {}) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        fail("adam: mismatched parameter/gradient/state sizes");
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Mat& m = state.m[i];
        Mat& v = state.v[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads[i];
        v = cfg.beta2 * v.array().matrix() + (1.0 - cfg.beta2) * grads[i].array().square().matrix();
        Mat m_hat = m / bc1;
        Mat v_hat = v / bc2;
        params[i]->array() -= cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
    }
}

}  // namespace treg
