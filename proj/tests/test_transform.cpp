#include <gtest/gtest.h>

#include <optional>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "treg/treg.hpp"

namespace treg {
namespace {

using testutil::bit_equal;
using testutil::gap_tree;
using testutil::stump_tree;

ThresholdMap two_cut_map() {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.trees.push_back(stump_tree(1, 2.0));
    ens.num_features = 2;
    return build_threshold_map(ens);
}

TEST(Transform, BinarizeIsStrictlyGreater) {
    EXPECT_DOUBLE_EQ(binarize(0.5, 0.5), 0.0);  // x == t stays on the low side
    EXPECT_DOUBLE_EQ(binarize(std::nextafter(0.5, 1.0), 0.5), 1.0);
    EXPECT_DOUBLE_EQ(binarize(-3.0, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(binarize(0.75, 0.5), 1.0);
}

TEST(Transform, NaiveBitsMatchHandValues) {
    const ThresholdMap map = two_cut_map();
    Mat X(3, 2);
    X << 0.5, 2.5,   // ties the first cut, beats the second
         0.7, 1.0,
         0.4, 2.0;   // ties the second cut
    const EmbeddingBatch out = transform_t2v_naive(X, map);

    EXPECT_EQ(out.mode, EmbedMode::T2V);
    EXPECT_EQ(out.k, 2);
    Mat want(3, 2);
    want << 0, 1, 1, 0, 0, 0;
    EXPECT_TRUE(bit_equal(out.data, want));
}

TEST(Transform, MatrixPathMatchesHandValues) {
    const ThresholdMap map = two_cut_map();
    const ProjectionPair proj = build_projection(map);
    Mat X(3, 2);
    X << 0.5, 2.5, 0.7, 1.0, 0.4, 2.0;
    Mat want(3, 2);
    want << 0, 1, 1, 0, 0, 0;
    EXPECT_TRUE(bit_equal(transform_t2v_matrix(X, proj).data, want));
}

TEST(Transform, MatrixEqualsNaiveOnRandomPairs) {
    std::mt19937_64 rng(51);
    for (int it = 0; it < 60; ++it) {
        const Ensemble ens = testutil::random_ensemble(rng, 10, 8, 4);
        const ThresholdMap map = build_threshold_map(ens);
        const ProjectionPair proj = build_projection(map);
        const Mat X = testutil::random_batch(rng, 32, 8, &ens);
        const EmbeddingBatch a = transform_t2v_naive(X, map);
        const EmbeddingBatch b = transform_t2v_matrix(X, proj);
        ASSERT_TRUE(bit_equal(a.data, b.data)) << "iteration " << it;
    }
}

TEST(Transform, EmptyMapGivesZeroWidth) {
    ThresholdMap map;
    map.num_features = 2;
    Mat X(4, 2);
    X.setZero();
    EXPECT_EQ(transform_t2v_naive(X, map).data.cols(), 0);
    EXPECT_EQ(transform_t2v_matrix(X, build_projection(map)).data.cols(), 0);
}

TEST(Transform, ChecksBatchWidth) {
    const ThresholdMap map = two_cut_map();
    Mat X(2, 3);
    X.setZero();
    EXPECT_THROW(transform_t2v_naive(X, map), std::runtime_error);
    EXPECT_THROW(transform_t2v_matrix(X, build_projection(map)), std::runtime_error);
}

TEST(Transform, TokensCarryTauAndEta) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.trees.push_back(gap_tree());
    ens.num_features = 4;
    const TokenLayout layout = build_token_layout(ens);
    ASSERT_EQ(layout.k, 7);

    Mat X(1, 4);
    X << 0.6, -2.0, 3.0, 1.0;
    const EmbeddingBatch out = transform_t2t(X, layout);
    EXPECT_EQ(out.mode, EmbedMode::T2T);
    EXPECT_EQ(out.d, 2);
    EXPECT_EQ(out.k, 7);
    ASSERT_EQ(out.data.cols(), 14);

    // tree 0 (stump): one comparison 0.6 > 0.5, then tail padding
    EXPECT_DOUBLE_EQ(out.data(0, 0), 1.0);
    for (int s = 1; s < 7; ++s) EXPECT_DOUBLE_EQ(out.data(0, s), -1.0);

    // tree 1: 0.6>0.5 -> 1; -2>-1.25 -> 0; 3>3 tie -> 0; 0.6>1.5 -> 0;
    //         1>0.75 -> 1; -2>2.25 -> 0; pseudo slot -> 0.5
    const double want[7] = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.5};
    for (int s = 0; s < 7; ++s) EXPECT_DOUBLE_EQ(out.data(0, 7 + s), want[s]) << "slot " << s;
}

TEST(Transform, CustomFillValues) {
    Ensemble ens;
    ens.trees.push_back(testutil::leaf_tree(0.0));
    ens.trees.push_back(testutil::right_spine_tree());
    ens.num_features = 2;
    const T2tConfig cfg{0.25, -2.0};
    const TokenLayout layout = build_token_layout(ens, cfg);
    Mat X(1, 2);
    X << 1.0, 0.0;
    const EmbeddingBatch out = transform_t2t(X, layout, cfg);
    for (int s = 0; s < 7; ++s) EXPECT_DOUBLE_EQ(out.data(0, s), -2.0);  // leaf-only tree
    // spine tree: cmp, pseudo, cmp, pseudo x3, cmp
    EXPECT_DOUBLE_EQ(out.data(0, 7), 1.0);   // 1 > 0
    EXPECT_DOUBLE_EQ(out.data(0, 8), 0.25);
    EXPECT_DOUBLE_EQ(out.data(0, 9), 0.0);   // 0 > 1 is false
    EXPECT_DOUBLE_EQ(out.data(0, 10), 0.25);
    EXPECT_DOUBLE_EQ(out.data(0, 11), 0.25);
    EXPECT_DOUBLE_EQ(out.data(0, 12), 0.25);
    EXPECT_DOUBLE_EQ(out.data(0, 13), 0.0);  // 1 > 2 is false
}

TEST(Transform, TokenValuesStayInAlphabet) {
    std::mt19937_64 rng(52);
    for (int it = 0; it < 20; ++it) {
        const Ensemble ens = testutil::random_ensemble(rng, 6, 5, 3);
        const TokenLayout layout = build_token_layout(ens);
        if (layout.k == 0) continue;
        const Mat X = testutil::random_batch(rng, 16, 5, &ens);
        const EmbeddingBatch out = transform_t2t(X, layout);
        for (long i = 0; i < out.data.rows(); ++i)
            for (long j = 0; j < out.data.cols(); ++j) {
                const double v = out.data(i, j);
                EXPECT_TRUE(v == 0.0 || v == 1.0 || v == 0.5 || v == -1.0)
                    << "value " << v << " at " << i << "," << j;
            }
    }
}

Mat collect_stream(const Mat& X, long batch_size, const ProjectionPair& proj) {
    auto xf = [&proj](const Mat& b) { return transform_t2v_matrix(b, proj); };
    auto stream = stream_transform(chunk_rows(X, batch_size), xf);
    Mat out(X.rows(), proj.V.size());
    long row = 0;
    while (std::optional<EmbeddingBatch> b = stream.next()) {
        out.middleRows(row, b->rows()) = b->data;
        row += b->rows();
    }
    EXPECT_EQ(row, X.rows());
    return out;
}

TEST(Transform, StreamingMatchesOneShotAcrossBatchSizes) {
    std::mt19937_64 rng(53);
    const Ensemble ens = testutil::random_ensemble(rng, 12, 6, 4);
    const ThresholdMap map = build_threshold_map(ens);
    const ProjectionPair proj = build_projection(map);
    const Mat X = testutil::random_batch(rng, 640, 6, &ens);

    const Mat whole = transform_t2v_matrix(X, proj).data;
    for (long bs : {64L, 128L, 256L, 512L, 7L, 641L}) {
        const Mat streamed = collect_stream(X, bs, proj);
        EXPECT_TRUE(bit_equal(streamed, whole)) << "batch size " << bs;
    }
}

TEST(Transform, StreamingCountsBatches) {
    std::mt19937_64 rng(54);
    const Ensemble ens = testutil::random_ensemble(rng, 4, 3, 3);
    const ProjectionPair proj = build_projection(build_threshold_map(ens));
    const Mat X = testutil::random_batch(rng, 130, 3);
    auto stream = stream_transform(chunk_rows(X, 64),
                                   [&](const Mat& b) { return transform_t2v_matrix(b, proj); });
    int n = 0;
    while (stream.next()) ++n;
    EXPECT_EQ(n, 3);  // 64 + 64 + 2
    EXPECT_EQ(stream.batches_seen(), 3u);
}

TEST(Transform, EmptySourceYieldsNothing) {
    const Mat X(0, 3);
    auto stream = stream_transform(chunk_rows(X, 16), [](const Mat& b) {
        return EmbeddingBatch{EmbedMode::T2V, 1, 3, b};
    });
    EXPECT_FALSE(stream.next().has_value());
    EXPECT_EQ(stream.batches_seen(), 0u);
}

TEST(Transform, StreamErrorsNameTheBatch) {
    const ThresholdMap map = two_cut_map();
    const Mat X = Mat::Zero(100, 3);  // wrong width for the 2-feature map
    auto stream = stream_transform(chunk_rows(X, 64),
                                   [&](const Mat& b) { return transform_t2v_naive(b, map); });
    try {
        stream.next();
        FAIL() << "expected a width error";
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find("batch 0"), std::string::npos) << e.what();
    }
}

TEST(Transform, ChunkRowsRejectsBadBatchSize) {
    const Mat X = Mat::Zero(4, 2);
    EXPECT_THROW(chunk_rows(X, 0), std::runtime_error);
}

}  // namespace
}  // namespace treg
