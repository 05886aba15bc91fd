#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "treg/treg.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) treg::fail("cannot open ", path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) treg::fail("cannot open ", path, " for writing");
    os << content;
    if (!os) treg::fail("failed writing ", path);
}

struct ModelFlags {
    std::string path;
    std::string format = "internal";
    int num_features = -1;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool required) {
    auto* opt = cmd->add_option("--model", f.path, "tree model file");
    if (required) opt->required();
    cmd->add_option("--format", f.format, "model format")
        ->check(CLI::IsMember({"internal", "booster"}));
    cmd->add_option("--num-features", f.num_features,
                    "feature count override for booster dumps");
}

treg::Ensemble load_ensemble(const ModelFlags& f) {
    if (f.path.empty()) treg::fail("--model is required");
    const std::string text = read_file(f.path);
    if (f.format == "booster") return treg::parse_booster_dump(text, f.num_features);
    if (f.num_features >= 0)
        treg::fail("--num-features only applies to --format booster");
    return treg::parse_internal(text);
}

struct CsvFlags {
    std::string label;
    std::string delimiter = ",";
    bool no_header = false;
    bool no_label = false;
};

void add_csv_flags(CLI::App* cmd, CsvFlags& f, bool allow_no_label) {
    cmd->add_option("--label", f.label, "label column name or index (default: last column)");
    cmd->add_option("--delimiter", f.delimiter, "field delimiter")->check(CLI::Validator(
        [](std::string& s) { return s.size() == 1 ? "" : "must be one character"; },
        "CHAR"));
    cmd->add_flag("--no-header", f.no_header, "first row is data, not column names");
    if (allow_no_label)
        cmd->add_flag("--no-label", f.no_label, "treat every column as a feature");
}

treg::DatasetFile dataset_file(const std::string& path, const CsvFlags& f) {
    treg::DatasetFile d;
    d.path = path;
    d.has_header = !f.no_header;
    d.has_label = !f.no_label;
    d.label_column = f.label;
    d.delimiter = f.delimiter[0];
    return d;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "treg: warning: " << w << "\n";
}

// ---------------------------------------------------------------- train-trees

struct TrainTreesOpts {
    std::string input, out;
    CsvFlags csv;
    treg::GbtConfig gbt;
};

void run_train_trees(const TrainTreesOpts& o) {
    treg::IngestResult ing = treg::ingest_csv(dataset_file(o.input, o.csv));
    print_warnings(ing.warnings);
    std::vector<double> losses;
    treg::Ensemble ens = treg::train_gbt(ing.X, ing.y, o.gbt, &losses);
    write_file(o.out, treg::serialize_internal(ens, 2) + "\n");
    std::printf("trained %zu trees on %ld rows, %d features (final train loss %.6f): %s\n",
                ens.trees.size(), static_cast<long>(ing.X.rows()), ens.num_features,
                losses.empty() ? 0.0 : losses.back(), o.out.c_str());
}

// ------------------------------------------------------------------ transform

struct TransformOpts {
    std::string mode = "t2v";
    ModelFlags model;
    std::string input, output;
    CsvFlags csv;
    long batch_size = 256;
    std::string dtype = "f64";
};

void run_transform(const TransformOpts& o) {
    treg::Ensemble ens = load_ensemble(o.model);
    treg::IngestResult ing = treg::ingest_csv(dataset_file(o.input, o.csv));
    print_warnings(ing.warnings);
    const auto dtype = o.dtype == "f32" ? treg::TensorDtype::F32 : treg::TensorDtype::F64;
    const auto n = static_cast<std::uint64_t>(ing.X.rows());

    std::ofstream os(o.output, std::ios::binary | std::ios::trunc);
    if (!os) treg::fail("cannot open ", o.output, " for writing");

    std::vector<std::uint64_t> dims;
    std::function<treg::EmbeddingBatch(const treg::Mat&)> xf;
    if (o.mode == "t2v") {
        treg::ThresholdMap map = treg::build_threshold_map(ens);
        treg::ProjectionPair proj = treg::build_projection(map);
        dims = {n, static_cast<std::uint64_t>(treg::embed_dim(map))};
        xf = [proj](const treg::Mat& b) { return treg::transform_t2v_matrix(b, proj); };
    } else {
        treg::TokenLayout layout = treg::build_token_layout(ens);
        dims = {n, static_cast<std::uint64_t>(layout.d), static_cast<std::uint64_t>(layout.k)};
        xf = [layout](const treg::Mat& b) { return treg::transform_t2t(b, layout); };
    }

    treg::write_trte_header(os, dtype, dims);
    auto stream = treg::stream_transform(treg::chunk_rows(ing.X, o.batch_size), xf);
    while (auto batch = stream.next())
        treg::write_trte_payload(os, dtype, batch->data.data(),
                                 static_cast<std::size_t>(batch->data.size()));
    os.close();
    if (!os) treg::fail("failed writing ", o.output);

    std::ostringstream shape;
    for (std::size_t i = 0; i < dims.size(); ++i) shape << (i ? ", " : "") << dims[i];
    std::printf("wrote %s: dims [%s], dtype %s, %zu batches\n", o.output.c_str(),
                shape.str().c_str(), o.dtype.c_str(), stream.batches_seen());
}

// ---------------------------------------------------------------------- synth

struct SynthOpts {
    treg::SynthConfig cfg;
    std::string out;
    bool experiment = false;
    bool no_rotate = false;
    double beta_min = 1.85, beta_max = 2.20, beta_step = 0.05;
};

void run_synth(const SynthOpts& o) {
    treg::SynthConfig cfg = o.cfg;
    cfg.rotate = !o.no_rotate;
    if (o.experiment) {
        std::vector<double> grid;
        for (double b = o.beta_min; b <= o.beta_max + 1e-9; b += o.beta_step) grid.push_back(b);
        treg::SynthReport rep = treg::run_synth_experiment(grid, cfg);
        write_file(o.out, treg::synth_csv(rep));
        for (const auto& s : rep.summary)
            std::printf("beta %.2f: mlp %.4f gbt %.4f\n", s.beta, s.mlp_mean, s.gbt_mean);
        std::printf("wrote %s\n", o.out.c_str());
        return;
    }
    treg::SynthDataset ds = treg::make_dataset(cfg);
    std::ostringstream os;
    os.precision(17);
    for (int j = 0; j < cfg.dim; ++j) os << 'x' << j << ',';
    os << "label,split\n";
    auto emit = [&](const treg::LabeledData& d, const char* split) {
        for (long i = 0; i < d.X.rows(); ++i) {
            for (long j = 0; j < d.X.cols(); ++j) os << d.X(i, j) << ',';
            os << d.y[i] << ',' << split << '\n';
        }
    };
    emit(ds.train, "train");
    emit(ds.val, "val");
    emit(ds.test, "test");
    write_file(o.out, os.str());
    std::printf("wrote %d points (dim %d, beta %.4f) to %s\n", cfg.n_samples, cfg.dim, cfg.beta,
                o.out.c_str());
}

// ------------------------------------------------------------------- train-nn

struct TrainNnOpts {
    std::string backbone = "mlp";
    std::string embed = "none";
    ModelFlags model;
    std::string train_path, val_path, out;
    CsvFlags csv;
    std::vector<int> hidden = {256, 128};
    treg::TrainConfig tc;
    int embed_dim = 8, heads = 4, blocks = 2, ffn_hidden = 32, clf_hidden = 128;
    bool no_positional_bias = false;
    std::uint64_t seed = 0;
};

struct EmbeddedData {
    treg::Mat X;
    long d = 1, k = 0;
};

void run_train_nn(const TrainNnOpts& o) {
    if (o.backbone == "mha" && o.embed != "t2t")
        treg::fail("--backbone mha requires --embed t2t (it consumes per-tree tokens)");
    if (o.embed != "none" && o.model.path.empty())
        treg::fail("--embed ", o.embed, " requires --model");

    treg::IngestResult tr = treg::ingest_csv(dataset_file(o.train_path, o.csv));
    print_warnings(tr.warnings);
    treg::Mat Xval_raw;
    std::vector<int> yval;
    if (!o.val_path.empty()) {
        treg::IngestResult va = treg::ingest_csv(dataset_file(o.val_path, o.csv), &tr.encoders);
        print_warnings(va.warnings);
        Xval_raw = va.X;
        yval = va.y;
    } else {
        // no --val: hold out a seeded 20% tail of the training rows
        std::vector<long> order(tr.X.rows());
        std::iota(order.begin(), order.end(), 0L);
        std::mt19937_64 rng(treg::derive_seed(o.seed, 99));
        std::shuffle(order.begin(), order.end(), rng);
        const long n_val = std::max<long>(1, tr.X.rows() / 5);
        const long n_tr = tr.X.rows() - n_val;
        if (n_tr < 1) treg::fail("training split is empty after holdout");
        treg::Mat Xtr(n_tr, tr.X.cols());
        std::vector<int> ytr(n_tr);
        Xval_raw.resize(n_val, tr.X.cols());
        yval.resize(n_val);
        for (long i = 0; i < n_tr; ++i) {
            Xtr.row(i) = tr.X.row(order[i]);
            ytr[i] = tr.y[order[i]];
        }
        for (long i = 0; i < n_val; ++i) {
            Xval_raw.row(i) = tr.X.row(order[n_tr + i]);
            yval[i] = tr.y[order[n_tr + i]];
        }
        tr.X = std::move(Xtr);
        tr.y = std::move(ytr);
    }

    json meta = {{"backbone", o.backbone},
                 {"embed", o.embed},
                 {"encoders", treg::encoders_to_json(tr.encoders)},
                 {"feature_names", tr.feature_names}};

    auto embed = [&](const treg::Mat& X) { return EmbeddedData{X, 1, X.cols()}; };
    std::function<EmbeddedData(const treg::Mat&)> embed_fn = embed;
    if (o.embed == "t2v") {
        treg::Ensemble ens = load_ensemble(o.model);
        treg::ThresholdMap map = treg::build_threshold_map(ens);
        treg::ProjectionPair proj = treg::build_projection(map);
        meta["t2v_map"] = treg::threshold_map_to_json(map);
        embed_fn = [proj](const treg::Mat& X) {
            auto b = treg::transform_t2v_matrix(X, proj);
            return EmbeddedData{std::move(b.data), 1, b.k};
        };
    } else if (o.embed == "t2t") {
        treg::Ensemble ens = load_ensemble(o.model);
        treg::TokenLayout layout = treg::build_token_layout(ens);
        meta["t2t_layout"] = treg::token_layout_to_json(layout);
        embed_fn = [layout](const treg::Mat& X) {
            auto b = treg::transform_t2t(X, layout);
            return EmbeddedData{std::move(b.data), b.d, b.k};
        };
    }
    EmbeddedData etr = embed_fn(tr.X);
    EmbeddedData eva = embed_fn(Xval_raw);

    treg::TrainConfig tc = o.tc;
    tc.seed = treg::derive_seed(o.seed, 2);
    treg::TrainResult result;

    if (o.backbone == "mlp") {
        std::vector<int> dims{static_cast<int>(etr.X.cols())};
        dims.insert(dims.end(), o.hidden.begin(), o.hidden.end());
        dims.push_back(2);
        treg::Mlp model(treg::MlpConfig{dims, treg::derive_seed(o.seed, 1)});
        meta["mlp"] = {{"layer_dims", dims}};
        result = treg::train(model, etr.X, tr.y, eva.X, yval, tc);
        treg::save_model(model, meta, o.out);
    } else {
        treg::MhaConfig mc;
        mc.num_trees = static_cast<int>(etr.d);
        mc.token_len = static_cast<int>(etr.k);
        mc.embed_dim = o.embed_dim;
        mc.num_heads = o.heads;
        mc.num_blocks = o.blocks;
        mc.ffn_hidden = o.ffn_hidden;
        mc.clf_hidden = o.clf_hidden;
        mc.positional_bias = !o.no_positional_bias;
        mc.seed = treg::derive_seed(o.seed, 1);
        treg::Mha model(mc);
        meta["mha"] = {{"num_trees", mc.num_trees},     {"token_len", mc.token_len},
                       {"embed_dim", mc.embed_dim},     {"num_heads", mc.num_heads},
                       {"num_blocks", mc.num_blocks},   {"ffn_hidden", mc.ffn_hidden},
                       {"clf_hidden", mc.clf_hidden},   {"positional_bias", mc.positional_bias},
                       {"ln_eps", mc.ln_eps}};
        result = treg::train(model, etr.X, tr.y, eva.X, yval, tc);
        treg::save_model(model, meta, o.out);
    }

    for (const auto& st : result.history)
        std::printf("epoch %3d  train %.6f  val %.6f  auc %.4f\n", st.epoch, st.train_loss,
                    st.val_loss, st.val_auc);
    std::printf("stopped: %s after %zu epochs; best epoch %d (val loss %.6f); wrote %s\n",
                result.stop_reason.c_str(), result.history.size(), result.best_epoch,
                result.best_val_loss, o.out.c_str());
}

// ----------------------------------------------------------------------- eval

struct EvalOpts {
    std::string checkpoint, input;
    CsvFlags csv;
};

void run_eval(const EvalOpts& o) {
    treg::Checkpoint ck = treg::read_checkpoint(o.checkpoint);
    const std::string backbone = ck.meta.value("backbone", "");
    const std::string embed = ck.meta.value("embed", "none");
    if (backbone != "mlp" && backbone != "mha")
        treg::fail("checkpoint has unknown backbone '", backbone, "'");

    std::vector<treg::ColumnEncoder> encoders =
        treg::encoders_from_json(ck.meta.value("encoders", json::array()));
    treg::IngestResult ing = treg::ingest_csv(dataset_file(o.input, o.csv), &encoders);
    print_warnings(ing.warnings);

    treg::Mat X;
    if (embed == "t2v") {
        treg::ThresholdMap map = treg::threshold_map_from_json(ck.meta.at("t2v_map"));
        X = treg::transform_t2v_matrix(ing.X, treg::build_projection(map)).data;
    } else if (embed == "t2t") {
        treg::TokenLayout layout = treg::token_layout_from_json(ck.meta.at("t2t_layout"));
        X = treg::transform_t2t(ing.X, layout).data;
    } else {
        X = ing.X;
    }

    treg::Mat logits;
    if (backbone == "mlp") {
        treg::Mlp model(treg::MlpConfig{
            ck.meta.at("mlp").at("layer_dims").get<std::vector<int>>(), 0});
        treg::apply_checkpoint(model, ck);
        logits = model.forward(X);
    } else {
        const json& m = ck.meta.at("mha");
        treg::MhaConfig mc;
        mc.num_trees = m.at("num_trees").get<int>();
        mc.token_len = m.at("token_len").get<int>();
        mc.embed_dim = m.at("embed_dim").get<int>();
        mc.num_heads = m.at("num_heads").get<int>();
        mc.num_blocks = m.at("num_blocks").get<int>();
        mc.ffn_hidden = m.at("ffn_hidden").get<int>();
        mc.clf_hidden = m.at("clf_hidden").get<int>();
        mc.positional_bias = m.at("positional_bias").get<bool>();
        mc.ln_eps = m.at("ln_eps").get<double>();
        treg::Mha model(mc);
        treg::apply_checkpoint(model, ck);
        logits = model.forward(X);
    }

    const double a = treg::auc(treg::logit_scores(logits), ing.y);
    std::vector<int> preds(logits.rows());
    for (long i = 0; i < logits.rows(); ++i) preds[i] = logits(i, 1) > logits(i, 0);
    std::printf("AUC (%%): %.2f\n", 100.0 * a);
    std::printf("accuracy (%%): %.2f\n", 100.0 * treg::accuracy(preds, ing.y));
}

// ---------------------------------------------------------------------- bench

struct BenchOpts {
    treg::BenchConfig cfg;
    std::string out;
};

void run_bench(const BenchOpts& o) {
    treg::BenchReport rep = treg::run_bench(o.cfg);
    write_file(o.out, treg::bench_csv(rep));
    for (const auto& r : rep.rows)
        if (r.mode == "t2v_mlp")
            std::printf("trees %4d  batch %4d  t2v %.6fs  ratio %.2fx\n", r.n_trees,
                        r.batch_size, r.mean_s, r.ratio_vs_vanilla);
    std::printf("wrote %s\n", o.out.c_str());
}

// -------------------------------------------------------------------- inspect

struct InspectOpts {
    std::string t2v_model, t2t_model;
    ModelFlags model;  // --format / --num-features only
};

void run_inspect(const InspectOpts& o) {
    if (o.t2v_model.empty() == o.t2t_model.empty())
        treg::fail("inspect needs exactly one of --t2v-map or --t2t-layout");
    ModelFlags mf = o.model;
    if (!o.t2v_model.empty()) {
        mf.path = o.t2v_model;
        treg::ThresholdMap map = treg::build_threshold_map(load_ensemble(mf));
        std::cout << treg::threshold_map_to_json(map).dump(2) << "\n";
        std::printf("k = %d\n", treg::embed_dim(map));
    } else {
        mf.path = o.t2t_model;
        treg::TokenLayout layout = treg::build_token_layout(load_ensemble(mf));
        std::cout << treg::token_layout_to_json(layout).dump(2) << "\n";
        std::printf("d = %d, k = %d\n", layout.d, layout.k);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tree-regularized tabular embeddings"};
    app.require_subcommand(1);

    TrainTreesOpts tt;
    auto* c_tt = app.add_subcommand("train-trees", "train a boosted tree ensemble on a CSV");
    c_tt->add_option("--input", tt.input, "training CSV")->required();
    c_tt->add_option("--out", tt.out, "output model JSON")->required();
    add_csv_flags(c_tt, tt.csv, false);
    c_tt->add_option("--trees", tt.gbt.n_trees, "number of trees");
    c_tt->add_option("--depth", tt.gbt.max_depth, "maximum split depth");
    c_tt->add_option("--learning-rate", tt.gbt.learning_rate, "shrinkage");
    c_tt->add_option("--lambda", tt.gbt.lambda, "L2 leaf regularizer");
    c_tt->add_option("--min-child-weight", tt.gbt.min_child_weight, "minimum child hessian sum");
    c_tt->add_option("--seed", tt.gbt.seed, "random seed")->envname("TREG_SEED");
    c_tt->callback([&tt] { run_train_trees(tt); });

    TransformOpts tf;
    auto* c_tf = app.add_subcommand("transform", "embed CSV rows with a tree model");
    c_tf->add_option("--mode", tf.mode, "embedding mode")
        ->check(CLI::IsMember({"t2v", "t2t"}))
        ->required();
    add_model_flags(c_tf, tf.model, true);
    c_tf->add_option("--input", tf.input, "input CSV")->required();
    c_tf->add_option("--output", tf.output, "output TRTE tensor file")->required();
    add_csv_flags(c_tf, tf.csv, true);
    c_tf->add_option("--batch-size", tf.batch_size, "rows per streamed batch")
        ->check(CLI::PositiveNumber);
    c_tf->add_option("--dtype", tf.dtype, "payload dtype")
        ->check(CLI::IsMember({"f32", "f64"}));
    std::uint64_t tf_seed = 0;  // transform is deterministic; accepted for interface parity
    c_tf->add_option("--seed", tf_seed, "random seed")->envname("TREG_SEED");
    c_tf->callback([&tf] { run_transform(tf); });

    SynthOpts sy;
    auto* c_sy = app.add_subcommand("synth", "hypersphere-cap synthetic data / experiment");
    c_sy->add_option("--out", sy.out, "output CSV")->required();
    c_sy->add_option("--beta", sy.cfg.beta, "max squared distance to the class center");
    c_sy->add_option("--dim", sy.cfg.dim, "ambient dimension");
    c_sy->add_option("--n", sy.cfg.n_samples, "sample count (multiple of 10)");
    c_sy->add_option("--trials", sy.cfg.n_trials, "trials per beta (experiment mode)");
    c_sy->add_flag("--no-rotate", sy.no_rotate, "keep centers axis-aligned");
    c_sy->add_flag("--experiment", sy.experiment, "run the MLP-vs-GBT beta sweep");
    c_sy->add_option("--beta-min", sy.beta_min, "sweep start");
    c_sy->add_option("--beta-max", sy.beta_max, "sweep end (inclusive)");
    c_sy->add_option("--beta-step", sy.beta_step, "sweep step")->check(CLI::PositiveNumber);
    c_sy->add_option("--seed", sy.cfg.seed, "random seed")->envname("TREG_SEED");
    c_sy->callback([&sy] { run_synth(sy); });

    TrainNnOpts tn;
    auto* c_tn = app.add_subcommand("train-nn", "train a neural backbone, optionally on embeddings");
    c_tn->add_option("--backbone", tn.backbone, "network kind")
        ->check(CLI::IsMember({"mlp", "mha"}))
        ->required();
    c_tn->add_option("--embed", tn.embed, "input representation")
        ->check(CLI::IsMember({"none", "t2v", "t2t"}));
    add_model_flags(c_tn, tn.model, false);
    c_tn->add_option("--train", tn.train_path, "training CSV")->required();
    c_tn->add_option("--val", tn.val_path, "validation CSV (default: 20% holdout)");
    c_tn->add_option("--out", tn.out, "checkpoint manifest path")->required();
    add_csv_flags(c_tn, tn.csv, false);
    c_tn->add_option("--hidden", tn.hidden, "MLP hidden sizes")->delimiter(',');
    c_tn->add_option("--lr", tn.tc.adam.lr, "Adam learning rate");
    c_tn->add_option("--batch-size", tn.tc.batch_size, "minibatch size");
    c_tn->add_option("--patience", tn.tc.patience, "early-stopping patience");
    c_tn->add_option("--timeout", tn.tc.timeout_seconds, "training timeout in seconds");
    c_tn->add_option("--max-epochs", tn.tc.max_epochs, "epoch cap");
    c_tn->add_option("--embed-dim", tn.embed_dim, "MHA token embedding width");
    c_tn->add_option("--heads", tn.heads, "MHA attention heads");
    c_tn->add_option("--blocks", tn.blocks, "MHA encoder blocks");
    c_tn->add_option("--ffn-hidden", tn.ffn_hidden, "MHA feed-forward width");
    c_tn->add_option("--clf-hidden", tn.clf_hidden, "MHA classifier hidden width");
    c_tn->add_flag("--no-positional-bias", tn.no_positional_bias,
                   "disable the learned per-tree bias");
    c_tn->add_option("--seed", tn.seed, "random seed")->envname("TREG_SEED");
    c_tn->callback([&tn] { run_train_nn(tn); });

    EvalOpts ev;
    auto* c_ev = app.add_subcommand("eval", "evaluate a checkpoint on a labeled CSV");
    c_ev->add_option("--checkpoint", ev.checkpoint, "checkpoint manifest")->required();
    c_ev->add_option("--input", ev.input, "test CSV")->required();
    add_csv_flags(c_ev, ev.csv, false);
    std::uint64_t ev_seed = 0;
    c_ev->add_option("--seed", ev_seed, "random seed")->envname("TREG_SEED");
    c_ev->callback([&ev] { run_eval(ev); });

    BenchOpts be;
    auto* c_be = app.add_subcommand("bench", "time T2V+MLP vs vanilla MLP forward passes");
    c_be->add_option("--out", be.out, "output CSV")->required();
    c_be->add_option("--batch-sizes", be.cfg.batch_sizes, "batch size grid")->delimiter(',');
    c_be->add_option("--tree-counts", be.cfg.tree_counts, "tree count grid")->delimiter(',');
    c_be->add_option("--reps", be.cfg.reps, "timed repetitions per cell (>= 10)");
    c_be->add_option("--warmup", be.cfg.warmup, "untimed warmup repetitions");
    c_be->add_option("--seed", be.cfg.seed, "random seed")->envname("TREG_SEED");
    c_be->callback([&be] { run_bench(be); });

    InspectOpts in;
    auto* c_in = app.add_subcommand("inspect", "print derived T2V map / T2T layout");
    c_in->add_option("--t2v-map", in.t2v_model, "tree model to summarize as a threshold map");
    c_in->add_option("--t2t-layout", in.t2t_model, "tree model to summarize as token layouts");
    c_in->add_option("--format", in.model.format, "model format")
        ->check(CLI::IsMember({"internal", "booster"}));
    c_in->add_option("--num-features", in.model.num_features,
                     "feature count override for booster dumps");
    std::uint64_t in_seed = 0;
    c_in->add_option("--seed", in_seed, "random seed")->envname("TREG_SEED");
    c_in->callback([&in] { run_inspect(in); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "treg: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
