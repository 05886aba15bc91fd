#include <gtest/gtest.h>

#include <random>
#include <set>
#include <utility>

#include "test_util.hpp"
#include "treg/treg.hpp"

namespace treg {
namespace {

using testutil::leaf_tree;
using testutil::stump_tree;

TEST(T2v, RoundHalfAwayFromZero) {
    EXPECT_DOUBLE_EQ(round_decimals(2.5, 0), 3.0);
    EXPECT_DOUBLE_EQ(round_decimals(-2.5, 0), -3.0);
    EXPECT_DOUBLE_EQ(round_decimals(0.125, 2), 0.13);    // 12.5 -> 13
    EXPECT_DOUBLE_EQ(round_decimals(-0.125, 2), -0.13);
    EXPECT_DOUBLE_EQ(round_decimals(1.0, 4), 1.0);
    EXPECT_DOUBLE_EQ(round_decimals(0.50001, 4), 0.5);
    EXPECT_DOUBLE_EQ(round_decimals(0.50004, 4), 0.5);
    EXPECT_DOUBLE_EQ(round_decimals(1.23462, 4), 1.2346);
}

TEST(T2v, MapCollapsesNearbyThresholds) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.50001));
    ens.trees.push_back(stump_tree(0, 0.50004));
    ens.trees.push_back(stump_tree(1, 2.0));
    ens.num_features = 2;

    const ThresholdMap map = build_threshold_map(ens);
    ASSERT_EQ(map.entries.size(), 2u);
    EXPECT_EQ(embed_dim(map), 2);
    EXPECT_EQ(map.entries[0].feature, 0);
    EXPECT_DOUBLE_EQ(map.entries[0].threshold, 0.5);
    EXPECT_EQ(map.entries[1].feature, 1);
    EXPECT_DOUBLE_EQ(map.entries[1].threshold, 2.0);
}

TEST(T2v, SameThresholdOnTwoFeaturesStaysSeparate) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 1.0));
    ens.trees.push_back(stump_tree(1, 1.0));
    ens.num_features = 2;
    EXPECT_EQ(embed_dim(build_threshold_map(ens)), 2);
}

TEST(T2v, LeafOnlyEnsembleHasEmptyMap) {
    Ensemble ens;
    ens.trees.push_back(leaf_tree(0.3));
    ens.num_features = 1;
    const ThresholdMap map = build_threshold_map(ens);
    EXPECT_EQ(embed_dim(map), 0);
    EXPECT_TRUE(map.entries.empty());
}

TEST(T2v, DuplicatingTreesLeavesMapUnchanged) {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 20; ++it) {
        Ensemble ens = testutil::random_ensemble(rng, 6, 5, 4);
        const ThresholdMap base = build_threshold_map(ens);
        const std::size_t n = ens.trees.size();
        for (std::size_t i = 0; i < n; ++i) ens.trees.push_back(ens.trees[i]);
        const ThresholdMap doubled = build_threshold_map(ens);
        EXPECT_EQ(doubled.entries, base.entries) << "iteration " << it;
    }
}

TEST(T2v, MapHasNoDuplicatesAndIsSorted) {
    std::mt19937_64 rng(32);
    for (int it = 0; it < 20; ++it) {
        const Ensemble ens = testutil::random_ensemble(rng, 10, 8, 4);
        const ThresholdMap map = build_threshold_map(ens);
        std::set<std::pair<int, double>> seen;
        for (const ThresholdEntry& e : map.entries)
            EXPECT_TRUE(seen.emplace(e.feature, e.threshold).second);
        for (std::size_t i = 1; i < map.entries.size(); ++i)
            EXPECT_LT(map.entries[i - 1], map.entries[i]);
    }
}

TEST(T2v, CoarserEpsilonCollapsesMore) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.41));
    ens.trees.push_back(stump_tree(0, 0.43));
    ens.num_features = 1;
    EXPECT_EQ(embed_dim(build_threshold_map(ens, T2vConfig{2})), 2);
    EXPECT_EQ(embed_dim(build_threshold_map(ens, T2vConfig{1})), 1);
    EXPECT_EQ(embed_dim(build_threshold_map(ens, T2vConfig{0})), 1);
    EXPECT_THROW(build_threshold_map(ens, T2vConfig{-1}), std::runtime_error);
}

TEST(T2v, ProjectionIsOneHot) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.trees.push_back(stump_tree(2, -1.5));
    ens.num_features = 3;
    const ThresholdMap map = build_threshold_map(ens);
    const ProjectionPair proj = build_projection(map);

    ASSERT_EQ(proj.U.rows(), 3);
    ASSERT_EQ(proj.U.cols(), 2);
    ASSERT_EQ(proj.V.size(), 2);
    for (long j = 0; j < proj.U.cols(); ++j) {
        EXPECT_DOUBLE_EQ(proj.U.col(j).sum(), 1.0);
        EXPECT_DOUBLE_EQ(proj.U(map.entries[j].feature, j), 1.0);
        EXPECT_DOUBLE_EQ(proj.V[j], map.entries[j].threshold);
        EXPECT_EQ(proj.cols[j], map.entries[j].feature);
    }
}

TEST(T2v, JsonRoundTrip) {
    std::mt19937_64 rng(33);
    const Ensemble ens = testutil::random_ensemble(rng, 6, 5, 3);
    const ThresholdMap map = build_threshold_map(ens);
    const ThresholdMap back = threshold_map_from_json(threshold_map_to_json(map));
    EXPECT_EQ(back.entries, map.entries);
    EXPECT_EQ(back.num_features, map.num_features);
}

TEST(T2v, JsonRejectsBadShapes) {
    nlohmann::json j;
    j["m"] = 2;
    j["entries"] = nlohmann::json::array({nlohmann::json::array({0, 0.5, 99.0})});
    EXPECT_THROW(threshold_map_from_json(j), std::runtime_error);

    j["entries"] = nlohmann::json::array({nlohmann::json::array({5, 0.5})});
    EXPECT_THROW(threshold_map_from_json(j), std::runtime_error);  // feature out of range

    j["entries"] = nlohmann::json::array();
    j["m"] = 0;
    EXPECT_THROW(threshold_map_from_json(j), std::runtime_error);
}

}  // namespace
}  // namespace treg
