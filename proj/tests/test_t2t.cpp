#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "treg/treg.hpp"

namespace treg {
namespace {

using testutil::full_depth2_tree;
using testutil::gap_tree;
using testutil::leaf_tree;
using testutil::right_spine_tree;
using testutil::stump_tree;

TEST(T2t, GapTreeHasSevenSlotsWithOnePseudo) {
    Ensemble ens;
    ens.trees.push_back(gap_tree());
    ens.num_features = 4;
    const TokenLayout layout = build_token_layout(ens);

    EXPECT_EQ(layout.d, 1);
    EXPECT_EQ(layout.k, 7);
    const auto& slots = layout.slots[0];
    ASSERT_EQ(slots.size(), 7u);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(slots[i].kind, SlotKind::Compare) << "slot " << i;
    EXPECT_EQ(slots[6].kind, SlotKind::Pseudo);

    // level order: root, its children, then the depth-2 row left to right
    EXPECT_EQ(slots[0].feature, 0);
    EXPECT_DOUBLE_EQ(slots[0].threshold, 0.5);
    EXPECT_EQ(slots[1].feature, 1);
    EXPECT_DOUBLE_EQ(slots[1].threshold, -1.25);
    EXPECT_EQ(slots[2].feature, 2);
    EXPECT_DOUBLE_EQ(slots[2].threshold, 3.0);
    EXPECT_EQ(slots[3].feature, 0);
    EXPECT_DOUBLE_EQ(slots[3].threshold, 1.5);
    EXPECT_EQ(slots[4].feature, 3);
    EXPECT_DOUBLE_EQ(slots[4].threshold, 0.75);
    EXPECT_EQ(slots[5].feature, 1);
    EXPECT_DOUBLE_EQ(slots[5].threshold, 2.25);
}

TEST(T2t, SingleStumpIsOneCompareSlot) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.num_features = 1;
    const TokenLayout layout = build_token_layout(ens);
    EXPECT_EQ(token_dims(layout), (std::pair<int, int>{1, 1}));
    ASSERT_EQ(layout.slots[0].size(), 1u);
    EXPECT_EQ(layout.slots[0][0].kind, SlotKind::Compare);
}

// Each tree completes to its own split depth; the shallow stump then pads out
// to the ensemble-wide token length with eta, not with pseudo slots.
TEST(T2t, StumpPadsOutNextToDeepTree) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.trees.push_back(full_depth2_tree());
    ens.num_features = 3;
    const TokenLayout layout = build_token_layout(ens);

    EXPECT_EQ(token_dims(layout), (std::pair<int, int>{2, 7}));
    const auto& stump = layout.slots[0];
    ASSERT_EQ(stump.size(), 7u);
    EXPECT_EQ(stump[0].kind, SlotKind::Compare);
    for (int i = 1; i < 7; ++i) EXPECT_EQ(stump[i].kind, SlotKind::Pad) << "slot " << i;

    const auto& full = layout.slots[1];
    for (int i = 0; i < 7; ++i) EXPECT_EQ(full[i].kind, SlotKind::Compare) << "slot " << i;
}

TEST(T2t, RightSpineFillsAbsentPositionsWithPseudo) {
    Ensemble ens;
    ens.trees.push_back(right_spine_tree());
    ens.num_features = 2;
    const TokenLayout layout = build_token_layout(ens);
    ASSERT_EQ(layout.k, 7);
    const auto& s = layout.slots[0];
    EXPECT_EQ(s[0].kind, SlotKind::Compare);  // position 1
    EXPECT_EQ(s[1].kind, SlotKind::Pseudo);   // leaf at position 2
    EXPECT_EQ(s[2].kind, SlotKind::Compare);  // position 3
    EXPECT_EQ(s[3].kind, SlotKind::Pseudo);   // absent subtree under position 2
    EXPECT_EQ(s[4].kind, SlotKind::Pseudo);
    EXPECT_EQ(s[5].kind, SlotKind::Pseudo);   // leaf at position 6
    EXPECT_EQ(s[6].kind, SlotKind::Compare);  // position 7
    EXPECT_EQ(s[6].feature, 0);
    EXPECT_DOUBLE_EQ(s[6].threshold, 2.0);
}

TEST(T2t, LeafOnlyTreeIsAllPad) {
    Ensemble ens;
    ens.trees.push_back(leaf_tree(0.1));
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.num_features = 1;
    const TokenLayout layout = build_token_layout(ens);
    EXPECT_EQ(token_dims(layout), (std::pair<int, int>{2, 1}));
    EXPECT_EQ(layout.slots[0][0].kind, SlotKind::Pad);
    EXPECT_EQ(layout.slots[1][0].kind, SlotKind::Compare);
}

TEST(T2t, LeafOnlyEnsembleHasZeroLengthTokens) {
    Ensemble ens;
    ens.trees.push_back(leaf_tree(0.1));
    ens.num_features = 1;
    const TokenLayout layout = build_token_layout(ens);
    EXPECT_EQ(token_dims(layout), (std::pair<int, int>{1, 0}));
    EXPECT_TRUE(layout.slots[0].empty());
}

TEST(T2t, AppendingLeafOnlyTreeNeverChangesK) {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 10; ++it) {
        Ensemble ens = testutil::random_ensemble(rng, 6, 5, 4);
        const TokenLayout before = build_token_layout(ens);
        ens.trees.push_back(leaf_tree(-0.2));
        const TokenLayout after = build_token_layout(ens);
        EXPECT_EQ(after.d, before.d + 1);
        EXPECT_EQ(after.k, before.k);
        for (std::size_t s = 0; s < after.slots.back().size(); ++s)
            EXPECT_EQ(after.slots.back()[s].kind, SlotKind::Pad);
    }
}

TEST(T2t, IdenticalStructureGivesIdenticalSlots) {
    Ensemble ens;
    ens.trees.push_back(gap_tree());
    ens.trees.push_back(gap_tree());
    ens.num_features = 4;
    const TokenLayout layout = build_token_layout(ens);
    EXPECT_EQ(layout.slots[0], layout.slots[1]);
}

TEST(T2t, PadIsAlwaysAContiguousSuffix) {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 40; ++it) {
        const Ensemble ens = testutil::random_ensemble(rng, 8, 6, 4);
        const TokenLayout layout = build_token_layout(ens);
        ASSERT_EQ(static_cast<int>(layout.slots.size()), layout.d);
        for (const auto& slots : layout.slots) {
            ASSERT_EQ(static_cast<int>(slots.size()), layout.k);
            bool in_pad = false;
            for (const SlotSpec& s : slots) {
                if (s.kind == SlotKind::Pad) in_pad = true;
                else EXPECT_FALSE(in_pad) << "non-pad slot after padding began";
            }
        }
    }
}

// Per-tree completed lengths are 2^(depth+1) - 1: a power-of-two ladder.
TEST(T2t, CompletedLengthTracksSplitDepth) {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 30; ++it) {
        const Tree tree = testutil::random_tree(rng, 5, 4);
        const TreeStats stats = tree_stats(tree);
        Ensemble ens;
        ens.trees.push_back(tree);
        ens.num_features = 5;
        const TokenLayout layout = build_token_layout(ens);
        const int expect = stats.max_split_depth < 0
                               ? 0
                               : (1 << (stats.max_split_depth + 1)) - 1;
        EXPECT_EQ(layout.k, expect);
        // every split must surface as a comparison somewhere
        int compares = 0;
        for (const SlotSpec& s : layout.slots[0]) compares += s.kind == SlotKind::Compare;
        EXPECT_EQ(compares, stats.split_count);
    }
}

TEST(T2t, ConfigValidation) {
    Ensemble ens;
    ens.trees.push_back(stump_tree(0, 0.5));
    ens.num_features = 1;
    EXPECT_THROW(build_token_layout(ens, T2tConfig{0.0, -1.0}), std::runtime_error);
    EXPECT_THROW(build_token_layout(ens, T2tConfig{1.0, -1.0}), std::runtime_error);
    EXPECT_THROW(build_token_layout(ens, T2tConfig{0.5, 0.5}), std::runtime_error);
    EXPECT_THROW(build_token_layout(ens, T2tConfig{0.5, 1.0}), std::runtime_error);
    EXPECT_NO_THROW(build_token_layout(ens, T2tConfig{0.25, -2.0}));
    EXPECT_THROW(build_token_layout(Ensemble{{}, 1}), std::runtime_error);
}

TEST(T2t, JsonRoundTrip) {
    Ensemble ens;
    ens.trees.push_back(gap_tree());
    ens.trees.push_back(stump_tree(2, -0.75));
    ens.num_features = 4;
    const TokenLayout layout = build_token_layout(ens);
    const TokenLayout back = token_layout_from_json(token_layout_to_json(layout));
    EXPECT_EQ(back.d, layout.d);
    EXPECT_EQ(back.k, layout.k);
    EXPECT_EQ(back.slots, layout.slots);
}

}  // namespace
}  // namespace treg
