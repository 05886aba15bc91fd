#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "treg/common.hpp"
#include "treg/gbt.hpp"
#include "treg/metrics.hpp"
#include "treg/mlp.hpp"
#include "treg/train.hpp"

namespace treg {

struct SynthConfig {
    int dim = 100;
    double beta = 1.85;     // max squared distance to the class center
    int n_samples = 10000;  // split 60/20/20, stratified
    int n_trials = 5;
    bool rotate = true;  // rotate e1 by a seeded orthogonal transform
    std::uint64_t seed = 0;
};

inline void validate(const SynthConfig& cfg) {
    if (cfg.dim < 1) fail("synth: dim must be >= 1");
    if (!(cfg.beta > 0.0)) fail("synth: beta must be > 0");
    if (cfg.n_samples < 10 || cfg.n_samples % 10 != 0)
        fail("synth: n_samples must be a positive multiple of 10 for an exact "
             "stratified 60/20/20 split, got ", cfg.n_samples);
    if (cfg.n_trials < 1) fail("synth: n_trials must be >= 1");
}

struct SampleStats {
    long long proposals = 0;
    long long accepted = 0;
};

// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the sign of
// R's diagonal folded into Q.
inline Mat random_rotation(int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat G(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) G(i, j) = gauss(rng);
    Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ() * Mat::Identity(dim, dim);
    Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    return Q;
}

// Uniform on the unit sphere conditioned on ||x - center|| <= beta, by
// normalize-Gaussian proposals with rejection. ||x - c|| <= beta on unit
// vectors is the dot-product test x.c >= 1 - beta^2/2.
inline Mat sample_cap(const Vec& center, double beta, long count, std::mt19937_64& rng,
                      SampleStats* stats = nullptr) {
    const long dim = center.size();
    if (std::abs(center.norm() - 1.0) > 1e-9) fail("sample_cap: center must be a unit vector");
    if (!(beta > 0.0)) fail("sample_cap: beta must be > 0");
    if (count < 0) fail("sample_cap: negative count");
    const double min_dot = 1.0 - 0.5 * beta * beta;
    const bool whole_sphere = beta >= 2.0;
    constexpr long long kMaxProposals = 10'000'000;

    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat out(count, dim);
    Vec x(dim);
    long got = 0;
    long long proposals = 0;
    while (got < count) {
        if (proposals >= kMaxProposals)
            fail("sample_cap: exceeded ", kMaxProposals, " proposals with ", got, " of ", count,
                 " accepted (estimated acceptance rate ",
                 static_cast<double>(got) / static_cast<double>(proposals), ")");
        ++proposals;
        double norm2 = 0.0;
        for (long j = 0; j < dim; ++j) {
            x[j] = gauss(rng);
            norm2 += x[j] * x[j];
        }
        if (norm2 == 0.0) continue;
        x /= std::sqrt(norm2);
        if (whole_sphere || x.dot(center) >= min_dot) out.row(got++) = x;
    }
    if (stats) {
        stats->proposals += proposals;
        stats->accepted += got;
    }
    return out;
}

struct LabeledData {
    Mat X;
    std::vector<int> y;
};

struct SynthDataset {
    LabeledData train, val, test;
    Vec c0;  // class-0 center; class 1 uses -c0
};

// Class i is uniform on the cap ||x - c_i||^2 <= beta (dot test x.c_i >=
// 1 - beta/2). Caps are disjoint for beta < 2, exact hemispheres at beta = 2,
// and overlap in a band around the equator x.c0 = 0 beyond that, so the
// sweep range 1.85..2.20 moves the task from separable-with-margin to
// heavily overlapped.
inline SynthDataset make_dataset(const SynthConfig& cfg) {
    validate(cfg);
    Vec c0 = Vec::Zero(cfg.dim);
    c0[0] = 1.0;
    if (cfg.rotate) c0 = random_rotation(cfg.dim, derive_seed(cfg.seed, 1)) * c0;

    const double cap_radius = std::sqrt(cfg.beta);
    const long per_class = cfg.n_samples / 2;
    std::mt19937_64 rng0(derive_seed(cfg.seed, 2));
    std::mt19937_64 rng1(derive_seed(cfg.seed, 3));
    Mat pts0 = sample_cap(c0, cap_radius, per_class, rng0);
    Mat pts1 = sample_cap(-c0, cap_radius, per_class, rng1);

    // stratified 60/20/20: class layout inside each class block is iid, so
    // contiguous slices are valid strata
    const long tr = per_class * 6 / 10, va = per_class * 2 / 10, te = per_class - tr - va;
    std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 4));
    auto make_split = [&](long off, long len) {
        LabeledData d;
        d.X.resize(2 * len, cfg.dim);
        d.y.resize(2 * len);
        std::vector<long> order(2 * len);
        std::iota(order.begin(), order.end(), 0L);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (long i = 0; i < 2 * len; ++i) {
            const long slot = order[i];
            if (i < len) {
                d.X.row(slot) = pts0.row(off + i);
                d.y[slot] = 0;
            } else {
                d.X.row(slot) = pts1.row(off + i - len);
                d.y[slot] = 1;
            }
        }
        return d;
    };
    SynthDataset ds;
    ds.train = make_split(0, tr);
    ds.val = make_split(tr, va);
    ds.test = make_split(tr + va, te);
    ds.c0 = c0;
    return ds;
}

struct SynthCell {
    double beta = 0;
    std::string method;
    int trial = 0;
    double accuracy = 0;
};

struct SynthSummary {
    double beta = 0;
    double mlp_mean = 0;
    double gbt_mean = 0;
};

struct SynthReport {
    std::vector<SynthCell> cells;
    std::vector<SynthSummary> summary;
};

inline std::vector<int> argmax_preds(const Mat& logits) {
    std::vector<int> preds(logits.rows());
    for (long i = 0; i < logits.rows(); ++i) preds[i] = logits(i, 1) > logits(i, 0) ? 1 : 0;
    return preds;
}

inline std::vector<int> proba_preds(const Vec& probs) {
    std::vector<int> preds(probs.size());
    for (long i = 0; i < probs.size(); ++i) preds[i] = probs[i] > 0.5 ? 1 : 0;
    return preds;
}

// Per beta and trial: identical splits feed an MLP [dim,100,2] with early
// stopping and a default-config GBT; test accuracy goes into the report.
inline SynthReport run_synth_experiment(const std::vector<double>& beta_grid,
                                        const SynthConfig& base) {
    if (beta_grid.empty()) fail("synth: empty beta grid");
    SynthReport rep;
    for (std::size_t bi = 0; bi < beta_grid.size(); ++bi) {
        double mlp_sum = 0.0, gbt_sum = 0.0;
        for (int trial = 0; trial < base.n_trials; ++trial) {
            SynthConfig cfg = base;
            cfg.beta = beta_grid[bi];
            cfg.seed = derive_seed(base.seed, 100 + bi * base.n_trials + trial);
            SynthDataset ds = make_dataset(cfg);

            Ensemble ens = train_gbt(ds.train.X, ds.train.y);
            double gbt_acc = accuracy(proba_preds(predict_proba(ens, ds.test.X)), ds.test.y);

            Mlp mlp(MlpConfig{{cfg.dim, 100, 2}, derive_seed(cfg.seed, 7)});
            TrainConfig tc;
            tc.seed = derive_seed(cfg.seed, 8);
            train(mlp, ds.train.X, ds.train.y, ds.val.X, ds.val.y, tc);
            double mlp_acc = accuracy(argmax_preds(mlp.forward(ds.test.X)), ds.test.y);

            rep.cells.push_back({cfg.beta, "mlp", trial, mlp_acc});
            rep.cells.push_back({cfg.beta, "gbt", trial, gbt_acc});
            mlp_sum += mlp_acc;
            gbt_sum += gbt_acc;
        }
        rep.summary.push_back({beta_grid[bi], mlp_sum / base.n_trials, gbt_sum / base.n_trials});
    }
    return rep;
}

inline std::string synth_csv(const SynthReport& rep) {
    std::ostringstream os;
    os << "beta,method,trial,accuracy\n";
    os.precision(17);
    for (const auto& c : rep.cells)
        os << c.beta << ',' << c.method << ',' << c.trial << ',' << c.accuracy << '\n';
    for (const auto& s : rep.summary) {
        os << s.beta << ",mlp,mean," << s.mlp_mean << '\n';
        os << s.beta << ",gbt,mean," << s.gbt_mean << '\n';
    }
    return os.str();
}

}  // namespace treg
