#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "treg/t2t.hpp"
#include "treg/t2v.hpp"

namespace treg {

enum class EmbedMode { T2V, T2T };

// Dense row-major embedding batch. T2V rows have k entries; T2T rows hold d
// tokens of length k flattened token-major, so data is n x (d*k).
struct EmbeddingBatch {
    EmbedMode mode = EmbedMode::T2V;
    long d = 1;
    long k = 0;
    Mat data;

    long rows() const { return data.rows(); }
};

// Tie rule: equality maps to 0, mirroring step((sign(x - t) + 1) / 2) with
// sign(0) = 0.
inline double binarize(double x, double t) { return x > t ? 1.0 : 0.0; }

inline void check_columns(const Mat& batch, int expected, const char* what) {
    if (batch.cols() != expected)
        fail(what, ": batch has ", batch.cols(), " columns, expected ", expected);
}

// Iterative pairwise comparison; the reference the matrix form is tested against.
inline EmbeddingBatch transform_t2v_naive(const Mat& batch, const ThresholdMap& map) {
    check_columns(batch, map.num_features, "t2v");
    const long n = batch.rows();
    const long k = embed_dim(map);
    EmbeddingBatch out{EmbedMode::T2V, 1, k, Mat(n, k)};
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < k; ++j)
            out.data(i, j) = binarize(batch(i, map.entries[j].feature), map.entries[j].threshold);
    return out;
}

// step(X U - 1 V^T) with the gather formulation: U has one nonzero per column,
// so X U reduces to column gathers and the whole transform is O(n k).
inline EmbeddingBatch transform_t2v_matrix(const Mat& batch, const ProjectionPair& proj) {
    const long m = proj.U.rows();
    const long k = proj.U.cols();
    check_columns(batch, static_cast<int>(m), "t2v");
    const long n = batch.rows();
    Mat gathered(n, k);
    for (long j = 0; j < k; ++j) gathered.col(j) = batch.col(proj.cols[j]);
    EmbeddingBatch out{EmbedMode::T2V, 1, k, Mat(n, k)};
    out.data = ((gathered.rowwise() - proj.V.transpose()).array() > 0.0).cast<double>();
    return out;
}

inline EmbeddingBatch transform_t2t(const Mat& batch, const TokenLayout& layout,
                                    const T2tConfig& cfg = {}) {
    validate(cfg);
    const long n = batch.rows();
    const long d = layout.d;
    const long k = layout.k;
    if (n > 0 && !layout.slots.empty()) {
        int max_feature = -1;
        for (const auto& slots : layout.slots)
            for (const SlotSpec& s : slots)
                if (s.kind == SlotKind::Compare) max_feature = std::max(max_feature, s.feature);
        if (max_feature >= batch.cols())
            fail("t2t: batch has ", batch.cols(), " columns, layout references feature ",
                 max_feature);
    }
    EmbeddingBatch out{EmbedMode::T2T, d, k, Mat(n, d * k)};
    for (long i = 0; i < n; ++i) {
        for (long t = 0; t < d; ++t) {
            const auto& slots = layout.slots[t];
            for (long s = 0; s < k; ++s) {
                double& cell = out.data(i, t * k + s);
                switch (slots[s].kind) {
                    case SlotKind::Compare:
                        cell = binarize(batch(i, slots[s].feature), slots[s].threshold);
                        break;
                    case SlotKind::Pseudo: cell = cfg.tau; break;
                    case SlotKind::Pad: cell = cfg.eta; break;
                }
            }
        }
    }
    return out;
}

// Lazily maps a batch source through a transform. Holds one input batch at a
// time, so the peak footprint is a single (batch x output) block regardless of
// how many batches the source yields. Single consumer.
template <typename Source, typename Xf>
class StreamTransform {
public:
    StreamTransform(Source source, Xf xf) : source_(std::move(source)), xf_(std::move(xf)) {}

    std::optional<EmbeddingBatch> next() {
        std::optional<Mat> batch = source_();
        if (!batch) return std::nullopt;
        try {
            EmbeddingBatch out = xf_(*batch);
            ++index_;
            return out;
        } catch (const std::exception& e) {
            fail("batch ", index_, ": ", e.what());
        }
    }

    std::size_t batches_seen() const { return index_; }

private:
    Source source_;
    Xf xf_;
    std::size_t index_ = 0;
};

template <typename Source, typename Xf>
StreamTransform<Source, Xf> stream_transform(Source source, Xf xf) {
    return StreamTransform<Source, Xf>(std::move(source), std::move(xf));
}

// Batch source over an in-memory matrix; yields row blocks of at most
// batch_size rows in order.
inline std::function<std::optional<Mat>()> chunk_rows(const Mat& data, long batch_size) {
    if (batch_size < 1) fail("stream: batch size must be >= 1");
    long offset = 0;
    return [&data, batch_size, offset]() mutable -> std::optional<Mat> {
        if (offset >= data.rows()) return std::nullopt;
        long take = std::min(batch_size, data.rows() - offset);
        Mat block = data.middleRows(offset, take);
        offset += take;
        return block;
    };
}

}  // namespace treg
