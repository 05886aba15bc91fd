#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "treg/common.hpp"
#include "treg/mlp.hpp"

namespace treg {

inline Mat softmax_rows(const Mat& S) {
    Mat A(S.rows(), S.cols());
    for (long i = 0; i < S.rows(); ++i) {
        Eigen::RowVectorXd z = S.row(i).array() - S.row(i).maxCoeff();
        Eigen::RowVectorXd e = z.array().exp();
        A.row(i) = e / e.sum();
    }
    return A;
}

// Single-head attention on already-projected inputs; scale is 1/sqrt(key dim).
inline Mat scaled_dot_attention(const Mat& Q, const Mat& K, const Mat& V) {
    if (Q.cols() != K.cols()) fail("attention: Q has ", Q.cols(), " dims, K has ", K.cols());
    if (K.rows() != V.rows()) fail("attention: K has ", K.rows(), " rows, V has ", V.rows());
    const double alpha = 1.0 / std::sqrt(static_cast<double>(K.cols()));
    return softmax_rows(alpha * Q * K.transpose()) * V;
}

namespace nn_detail {

inline Mat layer_norm(const Mat& x, const Mat& gamma, const Mat& beta, double eps,
                      Mat* xhat_out, Vec* inv_out) {
    Mat xhat(x.rows(), x.cols());
    Mat y(x.rows(), x.cols());
    Vec inv(x.rows());
    for (long i = 0; i < x.rows(); ++i) {
        double mu = x.row(i).mean();
        double var = (x.row(i).array() - mu).square().mean();
        double iv = 1.0 / std::sqrt(var + eps);
        xhat.row(i) = (x.row(i).array() - mu) * iv;
        y.row(i) = xhat.row(i).cwiseProduct(gamma.row(0)) + beta.row(0);
        inv[i] = iv;
    }
    if (xhat_out) *xhat_out = std::move(xhat);
    if (inv_out) *inv_out = std::move(inv);
    return y;
}

// dx = inv * (dxhat - mean(dxhat) - xhat * mean(dxhat . xhat)), per row.
inline Mat layer_norm_backward(const Mat& dy, const Mat& xhat, const Vec& inv,
                               const Mat& gamma, Mat* dgamma, Mat* dbeta) {
    if (dgamma) *dgamma += (dy.array() * xhat.array()).colwise().sum().matrix();
    if (dbeta) *dbeta += dy.colwise().sum();
    Mat dx(dy.rows(), dy.cols());
    for (long i = 0; i < dy.rows(); ++i) {
        Eigen::RowVectorXd dxh = dy.row(i).cwiseProduct(gamma.row(0));
        double m1 = dxh.mean();
        double m2 = dxh.cwiseProduct(xhat.row(i)).mean();
        dx.row(i) = inv[i] * (dxh.array() - m1 - xhat.row(i).array() * m2);
    }
    return dx;
}

}  // namespace nn_detail

struct MhaConfig {
    int num_trees = 0;  // tokens per sample
    int token_len = 0;  // slots per token
    int embed_dim = 8;
    int num_heads = 4;
    int num_blocks = 2;
    int ffn_hidden = 32;
    int clf_hidden = 128;
    bool positional_bias = true;
    double ln_eps = 1e-5;
    std::uint64_t seed = 0;
};

inline void validate(const MhaConfig& cfg) {
    if (cfg.num_trees < 1) fail("mha: num_trees must be >= 1");
    if (cfg.token_len < 1) fail("mha: token_len must be >= 1");
    if (cfg.embed_dim < 1 || cfg.num_heads < 1) fail("mha: embed_dim and num_heads must be >= 1");
    if (cfg.embed_dim % cfg.num_heads != 0)
        fail("mha: embed_dim ", cfg.embed_dim, " not divisible by ", cfg.num_heads, " heads");
    if (cfg.num_blocks < 1) fail("mha: num_blocks must be >= 1");
    if (cfg.ffn_hidden < 1 || cfg.clf_hidden < 1) fail("mha: hidden dims must be >= 1");
    if (!(cfg.ln_eps > 0.0)) fail("mha: ln_eps must be positive");
}

struct MhaBlockParams {
    Mat Wq, bq, Wk, bk, Wv, bv, Wo, bo;
    Mat ln1_g, ln1_b;
    Mat W1, b1, W2, b2;
    Mat ln2_g, ln2_b;
};

struct MhaParamSet {
    Mat tok_W, tok_b;
    Mat pos;  // 0x0 when positional bias is disabled
    std::vector<MhaBlockParams> blocks;
    Mat clf_W1, clf_b1, clf_W2, clf_b2;
};

template <class ParamSet, class F>
void walk_mha_params(ParamSet& ps, F&& f) {
    f("token.weight", ps.tok_W);
    f("token.bias", ps.tok_b);
    if (ps.pos.size() > 0) f("pos_bias", ps.pos);
    for (std::size_t b = 0; b < ps.blocks.size(); ++b) {
        auto& bp = ps.blocks[b];
        const std::string p = msg("block", b, ".");
        f(p + "attn.wq", bp.Wq);
        f(p + "attn.bq", bp.bq);
        f(p + "attn.wk", bp.Wk);
        f(p + "attn.bk", bp.bk);
        f(p + "attn.wv", bp.Wv);
        f(p + "attn.bv", bp.bv);
        f(p + "attn.wo", bp.Wo);
        f(p + "attn.bo", bp.bo);
        f(p + "ln1.gamma", bp.ln1_g);
        f(p + "ln1.beta", bp.ln1_b);
        f(p + "ffn.w1", bp.W1);
        f(p + "ffn.b1", bp.b1);
        f(p + "ffn.w2", bp.W2);
        f(p + "ffn.b2", bp.b2);
        f(p + "ln2.gamma", bp.ln2_g);
        f(p + "ln2.beta", bp.ln2_b);
    }
    f("clf.w1", ps.clf_W1);
    f("clf.b1", ps.clf_b1);
    f("clf.w2", ps.clf_W2);
    f("clf.b2", ps.clf_b2);
}

// Encoder over per-tree tokens: linear token projection (+ learned per-tree
// bias), then post-LN attention/FFN blocks, then a flattened MLP head.
class Mha {
public:
    explicit Mha(MhaConfig cfg) : cfg_(std::move(cfg)) {
        validate(cfg_);
        std::mt19937_64 rng(cfg_.seed);
        const int e = cfg_.embed_dim;
        p_.tok_W = nn_detail::init_uniform(cfg_.token_len, e, cfg_.token_len, rng);
        p_.tok_b = Mat::Zero(1, e);
        if (cfg_.positional_bias) p_.pos = Mat::Zero(cfg_.num_trees, e);
        p_.blocks.resize(cfg_.num_blocks);
        for (auto& bp : p_.blocks) {
            bp.Wq = nn_detail::init_uniform(e, e, e, rng);
            bp.Wk = nn_detail::init_uniform(e, e, e, rng);
            bp.Wv = nn_detail::init_uniform(e, e, e, rng);
            bp.Wo = nn_detail::init_uniform(e, e, e, rng);
            bp.bq = bp.bk = bp.bv = bp.bo = Mat::Zero(1, e);
            bp.ln1_g = Mat::Ones(1, e);
            bp.ln1_b = Mat::Zero(1, e);
            bp.W1 = nn_detail::init_uniform(e, cfg_.ffn_hidden, e, rng);
            bp.b1 = Mat::Zero(1, cfg_.ffn_hidden);
            bp.W2 = nn_detail::init_uniform(cfg_.ffn_hidden, e, cfg_.ffn_hidden, rng);
            bp.b2 = Mat::Zero(1, e);
            bp.ln2_g = Mat::Ones(1, e);
            bp.ln2_b = Mat::Zero(1, e);
        }
        const long flat = static_cast<long>(cfg_.num_trees) * e;
        p_.clf_W1 = nn_detail::init_uniform(flat, cfg_.clf_hidden, flat, rng);
        p_.clf_b1 = Mat::Zero(1, cfg_.clf_hidden);
        p_.clf_W2 = nn_detail::init_uniform(cfg_.clf_hidden, 2, cfg_.clf_hidden, rng);
        p_.clf_b2 = Mat::Zero(1, 2);
    }

    const MhaConfig& config() const { return cfg_; }
    long input_dim() const { return static_cast<long>(cfg_.num_trees) * cfg_.token_len; }

    // tokens: num_trees x token_len -> num_trees x embed_dim
    Mat encoder_forward(const Mat& tokens) const {
        if (tokens.rows() != cfg_.num_trees || tokens.cols() != cfg_.token_len)
            fail("mha: token matrix is ", tokens.rows(), "x", tokens.cols(), ", expected ",
                 cfg_.num_trees, "x", cfg_.token_len);
        return encode(tokens, nullptr);
    }

    Mat forward(const Mat& X) const {
        check_input(X);
        Mat logits(X.rows(), 2);
        for (long i = 0; i < X.rows(); ++i) {
            Eigen::Map<const Mat> tokens(X.data() + i * X.cols(), cfg_.num_trees, cfg_.token_len);
            Mat enc = encode(tokens, nullptr);
            Eigen::Map<const Eigen::RowVectorXd> zc(enc.data(), enc.size());
            Eigen::RowVectorXd h = (zc * p_.clf_W1 + p_.clf_b1.row(0)).cwiseMax(0.0);
            logits.row(i) = h * p_.clf_W2 + p_.clf_b2.row(0);
        }
        if (!logits.allFinite()) fail("mha: non-finite logits");
        return logits;
    }

    double loss(const Mat& X, const std::vector<int>& y) const {
        return nn_detail::softmax_xent(forward(X), y).first;
    }

    std::pair<double, std::vector<Mat>> loss_grad(const Mat& X, const std::vector<int>& y) const {
        check_input(X);
        const long n = X.rows();
        if (static_cast<long>(y.size()) != n) fail("mha: ", y.size(), " labels for ", n, " rows");
        MhaParamSet g = p_;
        walk_mha_params(g, [](const std::string&, Mat& m) { m.setZero(); });

        const int e = cfg_.embed_dim;
        const int heads = cfg_.num_heads;
        const int hd = e / heads;
        const double alpha = 1.0 / std::sqrt(static_cast<double>(hd));
        double total = 0.0;
        for (long i = 0; i < n; ++i) {
            Eigen::Map<const Mat> tokens(X.data() + i * X.cols(), cfg_.num_trees, cfg_.token_len);
            std::vector<BlockCache> caches(cfg_.num_blocks);
            Mat enc = encode(tokens, &caches);

            Eigen::Map<const Eigen::RowVectorXd> zc(enc.data(), enc.size());
            Eigen::RowVectorXd h_pre = zc * p_.clf_W1 + p_.clf_b1.row(0);
            Eigen::RowVectorXd h = h_pre.cwiseMax(0.0);
            Mat logits = h * p_.clf_W2 + p_.clf_b2.row(0);
            if (!logits.allFinite()) fail("mha: non-finite logits");
            auto [li, dlogit] = nn_detail::softmax_xent(logits, {y[i]});
            total += li;
            dlogit /= static_cast<double>(n);

            // classifier backward
            g.clf_W2 += h.transpose() * dlogit;
            g.clf_b2 += dlogit;
            Eigen::RowVectorXd dh = (dlogit * p_.clf_W2.transpose()).array() *
                                    (h_pre.array() > 0.0).cast<double>();
            g.clf_W1 += zc.transpose() * dh;
            g.clf_b1 += dh;
            Eigen::RowVectorXd dzc = dh * p_.clf_W1.transpose();
            Mat dE = Eigen::Map<const Mat>(dzc.data(), cfg_.num_trees, e);

            for (int b = cfg_.num_blocks - 1; b >= 0; --b) {
                const auto& bp = p_.blocks[b];
                auto& bg = g.blocks[b];
                const auto& c = caches[b];
                Mat dr2 = nn_detail::layer_norm_backward(dE, c.xhat2, c.inv2, bp.ln2_g,
                                                         &bg.ln2_g, &bg.ln2_b);
                Mat de1 = dr2;
                bg.W2 += c.h_relu.transpose() * dr2;
                bg.b2 += dr2.colwise().sum();
                Mat dh_ffn = (dr2 * bp.W2.transpose()).array() *
                             (c.h_pre.array() > 0.0).cast<double>();
                bg.W1 += c.e1.transpose() * dh_ffn;
                bg.b1 += dh_ffn.colwise().sum();
                de1 += dh_ffn * bp.W1.transpose();

                Mat dr1 = nn_detail::layer_norm_backward(de1, c.xhat1, c.inv1, bp.ln1_g,
                                                         &bg.ln1_g, &bg.ln1_b);
                Mat dx = dr1;
                bg.Wo += c.O.transpose() * dr1;
                bg.bo += dr1.colwise().sum();
                Mat dO = dr1 * bp.Wo.transpose();
                Mat dQ(cfg_.num_trees, e), dK(cfg_.num_trees, e), dV(cfg_.num_trees, e);
                for (int hh = 0; hh < heads; ++hh) {
                    auto dOh = dO.middleCols(hh * hd, hd);
                    const Mat& Ah = c.A[hh];
                    Mat dA = dOh * c.V.middleCols(hh * hd, hd).transpose();
                    dV.middleCols(hh * hd, hd) = Ah.transpose() * dOh;
                    Vec rowsum = (dA.array() * Ah.array()).rowwise().sum();
                    Mat dS = (Ah.array() * (dA.colwise() - rowsum).array()).matrix();
                    dQ.middleCols(hh * hd, hd) = alpha * dS * c.K.middleCols(hh * hd, hd);
                    dK.middleCols(hh * hd, hd) = alpha * dS.transpose() * c.Q.middleCols(hh * hd, hd);
                }
                bg.Wq += c.x.transpose() * dQ;
                bg.bq += dQ.colwise().sum();
                bg.Wk += c.x.transpose() * dK;
                bg.bk += dK.colwise().sum();
                bg.Wv += c.x.transpose() * dV;
                bg.bv += dV.colwise().sum();
                dx += dQ * bp.Wq.transpose() + dK * bp.Wk.transpose() + dV * bp.Wv.transpose();
                dE = std::move(dx);
            }
            if (cfg_.positional_bias) g.pos += dE;
            g.tok_W += tokens.transpose() * dE;
            g.tok_b += dE.colwise().sum();
        }

        std::vector<Mat> grads;
        walk_mha_params(g, [&grads](const std::string&, Mat& m) { grads.push_back(std::move(m)); });
        return {total / static_cast<double>(n), std::move(grads)};
    }

    std::vector<Mat*> params() {
        std::vector<Mat*> out;
        walk_mha_params(p_, [&out](const std::string&, Mat& m) { out.push_back(&m); });
        return out;
    }

    std::vector<std::string> param_names() const {
        std::vector<std::string> out;
        walk_mha_params(p_, [&out](const std::string& name, const Mat&) { out.push_back(name); });
        return out;
    }

private:
    struct BlockCache {
        Mat x;              // block input
        Mat Q, K, V;        // projected, all heads side by side
        std::vector<Mat> A; // per-head attention weights
        Mat O;              // concatenated head outputs, pre out-projection
        Mat xhat1;
        Vec inv1;
        Mat e1;             // LN1 output, FFN input
        Mat h_pre, h_relu;
        Mat xhat2;
        Vec inv2;
    };

    Mat encode(const Eigen::Ref<const Mat>& tokens, std::vector<BlockCache>* caches) const {
        const int e = cfg_.embed_dim;
        const int heads = cfg_.num_heads;
        const int hd = e / heads;
        const double alpha = 1.0 / std::sqrt(static_cast<double>(hd));
        Mat x = (tokens * p_.tok_W).rowwise() + p_.tok_b.row(0);
        if (cfg_.positional_bias) x += p_.pos;
        for (int b = 0; b < cfg_.num_blocks; ++b) {
            const auto& bp = p_.blocks[b];
            BlockCache c;
            c.x = x;
            c.Q = (x * bp.Wq).rowwise() + bp.bq.row(0);
            c.K = (x * bp.Wk).rowwise() + bp.bk.row(0);
            c.V = (x * bp.Wv).rowwise() + bp.bv.row(0);
            c.A.resize(heads);
            c.O.resize(x.rows(), e);
            for (int hh = 0; hh < heads; ++hh) {
                c.A[hh] = softmax_rows(alpha * c.Q.middleCols(hh * hd, hd) *
                                       c.K.middleCols(hh * hd, hd).transpose());
                c.O.middleCols(hh * hd, hd) = c.A[hh] * c.V.middleCols(hh * hd, hd);
            }
            Mat attn_out = (c.O * bp.Wo).rowwise() + bp.bo.row(0);
            Mat r1 = x + attn_out;
            c.e1 = nn_detail::layer_norm(r1, bp.ln1_g, bp.ln1_b, cfg_.ln_eps, &c.xhat1, &c.inv1);
            c.h_pre = (c.e1 * bp.W1).rowwise() + bp.b1.row(0);
            c.h_relu = c.h_pre.cwiseMax(0.0);
            Mat r2 = c.e1 + ((c.h_relu * bp.W2).rowwise() + bp.b2.row(0));
            x = nn_detail::layer_norm(r2, bp.ln2_g, bp.ln2_b, cfg_.ln_eps, &c.xhat2, &c.inv2);
            if (!x.allFinite()) fail("mha: non-finite activations in block ", b);
            if (caches) (*caches)[b] = std::move(c);
        }
        return x;
    }

    void check_input(const Mat& X) const {
        if (X.cols() != input_dim())
            fail("mha: input has ", X.cols(), " columns, expected ", cfg_.num_trees, "x",
                 cfg_.token_len, " = ", input_dim());
    }

    MhaConfig cfg_;
    MhaParamSet p_;
};

}  // namespace treg
