#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "treg/common.hpp"
#include "treg/gbt.hpp"
#include "treg/mlp.hpp"
#include "treg/synth.hpp"
#include "treg/t2v.hpp"
#include "treg/transform.hpp"

namespace treg {

struct BenchConfig {
    std::vector<int> batch_sizes = {64, 128, 256, 512};
    std::vector<int> tree_counts = {10, 50, 100, 200};
    int reps = 10;
    int warmup = 3;
    std::uint64_t seed = 0;
};

inline void validate(const BenchConfig& cfg) {
    if (cfg.batch_sizes.empty() || cfg.tree_counts.empty()) fail("bench: empty grid");
    for (int b : cfg.batch_sizes)
        if (b < 1) fail("bench: batch sizes must be >= 1");
    for (int t : cfg.tree_counts)
        if (t < 1) fail("bench: tree counts must be >= 1");
    if (cfg.reps < 10) fail("bench: reps must be >= 10");
    if (cfg.warmup < 0) fail("bench: warmup must be >= 0");
}

struct BenchRow {
    int batch_size = 0;
    int n_trees = 0;
    std::string mode;  // "vanilla_mlp" | "t2v_mlp"
    double mean_s = 0;
    double std_s = 0;
    double median_of_means_s = 0;
    int n_reps = 0;
    double ratio_vs_vanilla = std::numeric_limits<double>::quiet_NaN();
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

namespace bench_detail {

struct RepStats {
    double mean = 0, stdev = 0, median_of_means = 0;
};

inline RepStats summarize(std::vector<double> times) {
    RepStats s;
    const double n = static_cast<double>(times.size());
    for (double t : times) s.mean += t;
    s.mean /= n;
    double ss = 0.0;
    for (double t : times) ss += (t - s.mean) * (t - s.mean);
    s.stdev = times.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    // desk machines are noisy: median over 5 chunk means is the robust column
    const std::size_t chunks = std::min<std::size_t>(5, times.size());
    std::vector<double> means;
    const std::size_t per = times.size() / chunks;
    for (std::size_t c = 0; c < chunks; ++c) {
        double m = 0.0;
        for (std::size_t i = c * per; i < (c + 1) * per; ++i) m += times[i];
        means.push_back(m / static_cast<double>(per));
    }
    std::sort(means.begin(), means.end());
    s.median_of_means = means[means.size() / 2];
    return s;
}

template <class F>
RepStats time_reps(int warmup, int reps, F&& body) {
    for (int i = 0; i < warmup; ++i) body();
    std::vector<double> times(reps);
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        times[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return summarize(times);
}

}  // namespace bench_detail

// Least-squares R^2 of y against x; 1.0 when y is constant (exact flat fit).
inline double linear_fit_r2(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) fail("r2: need >= 2 matched points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) fail("r2: degenerate x values");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double fit = slope * xs[i] + intercept;
        ss_res += (ys[i] - fit) * (ys[i] - fit);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    if (ss_tot == 0.0) return 1.0;
    return 1.0 - ss_res / ss_tot;
}

// Forward-timing grid: (T2V transform + MLP) vs a vanilla MLP on the same raw
// batches. One boosted ensemble is trained at the largest tree count; smaller
// counts reuse its prefix.
inline BenchReport run_bench(const BenchConfig& cfg = {}) {
    validate(cfg);
    const int dim = 100;
    const int max_batch = *std::max_element(cfg.batch_sizes.begin(), cfg.batch_sizes.end());
    SynthConfig sc;
    sc.dim = dim;
    sc.beta = 4.0;  // whole sphere: sampling never rejects
    // the 20% test split serves the timing batches, so it must fit the largest
    sc.n_samples = std::max(2000, (max_batch * 5 + 9) / 10 * 10);
    sc.seed = derive_seed(cfg.seed, 1);
    SynthDataset ds = make_dataset(sc);
    // relabel with a linear rule so the boosted trees learn real structure
    std::vector<int> y(ds.train.X.rows());
    for (long i = 0; i < ds.train.X.rows(); ++i)
        y[i] = ds.train.X.row(i).dot(ds.c0) > 0.0 ? 1 : 0;

    const int max_trees = *std::max_element(cfg.tree_counts.begin(), cfg.tree_counts.end());
    GbtConfig gc;
    gc.n_trees = max_trees;
    Ensemble master = train_gbt(ds.train.X, y, gc);

    if (ds.test.X.rows() < max_batch)
        fail("bench: test split has ", ds.test.X.rows(), " rows, need ", max_batch);

    BenchReport rep;
    double sink = 0.0;  // keep forwards observable
    for (int n_trees : cfg.tree_counts) {
        Ensemble sub;
        sub.num_features = master.num_features;
        sub.trees.assign(master.trees.begin(), master.trees.begin() + n_trees);
        ThresholdMap tmap = build_threshold_map(sub);
        ProjectionPair proj = build_projection(tmap);
        const int k = static_cast<int>(embed_dim(tmap));

        Mlp mlp_t2v(MlpConfig{{k, 256, 128, 2}, derive_seed(cfg.seed, 2)});
        Mlp mlp_vanilla(MlpConfig{{dim, 256, 128, 2}, derive_seed(cfg.seed, 3)});

        for (int bs : cfg.batch_sizes) {
            const Mat batch = ds.test.X.topRows(bs);
            auto vanilla = bench_detail::time_reps(cfg.warmup, cfg.reps, [&] {
                sink += mlp_vanilla.forward(batch).sum();
            });
            auto t2v = bench_detail::time_reps(cfg.warmup, cfg.reps, [&] {
                EmbeddingBatch emb = transform_t2v_matrix(batch, proj);
                sink += mlp_t2v.forward(emb.data).sum();
            });
            BenchRow vrow{bs, n_trees, "vanilla_mlp", vanilla.mean, vanilla.stdev,
                          vanilla.median_of_means, cfg.reps,
                          std::numeric_limits<double>::quiet_NaN()};
            BenchRow trow{bs, n_trees, "t2v_mlp", t2v.mean, t2v.stdev,
                          t2v.median_of_means, cfg.reps, t2v.mean / vanilla.mean};
            rep.rows.push_back(vrow);
            rep.rows.push_back(trow);
        }
    }
    if (!std::isfinite(sink)) fail("bench: non-finite forward outputs");
    return rep;
}

inline std::string bench_csv(const BenchReport& rep) {
    std::ostringstream os;
    os << "batch_size,n_trees,mode,mean_s,std_s,median_of_means_s,n_reps,ratio_vs_vanilla\n";
    os.precision(17);
    for (const auto& r : rep.rows) {
        os << r.batch_size << ',' << r.n_trees << ',' << r.mode << ',' << r.mean_s << ','
           << r.std_s << ',' << r.median_of_means_s << ',' << r.n_reps << ',';
        if (std::isnan(r.ratio_vs_vanilla))
            os << "";
        else
            os << r.ratio_vs_vanilla;
        os << '\n';
    }
    return os.str();
}

}  // namespace treg
