#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_set>
#include <vector>

#include "treg/common.hpp"

namespace treg {

enum class NodeKind { Split, Leaf };

struct Node {
    int id = 0;
    NodeKind kind = NodeKind::Leaf;
    int feature = -1;        // Split only
    double threshold = 0.0;  // Split only, kept bit-exact from the source
    int left = -1;           // Split only
    int right = -1;          // Split only
    double leaf_value = 0.0;  // Leaf only
    int depth = 0;            // root = 0, recomputed on parse

    bool operator==(const Node&) const = default;
};

inline Node make_split(int id, int feature, double threshold, int left, int right, int depth = 0) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Split;
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    n.depth = depth;
    return n;
}

inline Node make_leaf(int id, double value, int depth = 0) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Leaf;
    n.leaf_value = value;
    n.depth = depth;
    return n;
}

// Nodes are kept sorted by id so lookups can binary-search. Parsers and the
// trainer maintain this invariant; validate_ensemble() re-checks it.
struct Tree {
    std::vector<Node> nodes;
    int root_id = 0;

    const Node* find(int id) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const Node& n, int key) { return n.id < key; });
        if (it == nodes.end() || it->id != id) return nullptr;
        return &*it;
    }

    const Node& node(int id) const {
        const Node* n = find(id);
        if (!n) fail("tree: unknown node id ", id);
        return *n;
    }

    const Node& root() const { return node(root_id); }

    bool operator==(const Tree&) const = default;
};

inline void sort_nodes(Tree& tree) {
    std::sort(tree.nodes.begin(), tree.nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
}

struct Ensemble {
    std::vector<Tree> trees;  // order is significant: token identity follows it
    int num_features = 0;

    bool operator==(const Ensemble&) const = default;
};

struct TreeStats {
    int node_count = 0;
    int split_count = 0;
    int max_split_depth = -1;  // -1 when the tree has no split node
};

inline TreeStats tree_stats(const Tree& tree) {
    TreeStats s;
    s.node_count = static_cast<int>(tree.nodes.size());
    for (const Node& n : tree.nodes) {
        if (n.kind == NodeKind::Split) {
            ++s.split_count;
            s.max_split_depth = std::max(s.max_split_depth, n.depth);
        }
    }
    return s;
}

// Recomputes depths by BFS from the root. Requires a structurally valid tree.
inline void assign_depths(Tree& tree) {
    std::deque<std::pair<int, int>> queue{{tree.root_id, 0}};
    while (!queue.empty()) {
        auto [id, depth] = queue.front();
        queue.pop_front();
        auto it = std::lower_bound(tree.nodes.begin(), tree.nodes.end(), id,
                                   [](const Node& n, int key) { return n.id < key; });
        if (it == tree.nodes.end() || it->id != id) fail("tree: unknown node id ", id);
        it->depth = depth;
        if (it->kind == NodeKind::Split) {
            queue.emplace_back(it->left, depth + 1);
            queue.emplace_back(it->right, depth + 1);
        }
    }
}

inline void validate_tree(const Tree& tree, int num_features, int tree_index) {
    auto ctx = [&](int node_id) { return msg("tree ", tree_index, ", node ", node_id, ": "); };

    if (tree.nodes.empty()) fail("tree ", tree_index, ": has no nodes");
    for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i - 1].id >= tree.nodes[i].id)
            fail("tree ", tree_index, ": duplicate or unsorted node id ", tree.nodes[i].id);
    }
    if (!tree.find(tree.root_id)) fail("tree ", tree_index, ": missing root node ", tree.root_id);

    // BFS from root: every node reachable exactly once, child depths consistent.
    std::unordered_set<int> seen;
    std::deque<int> queue{tree.root_id};
    seen.insert(tree.root_id);
    if (tree.root().depth != 0) fail(ctx(tree.root_id), "root depth must be 0");
    while (!queue.empty()) {
        const Node& n = tree.node(queue.front());
        queue.pop_front();
        if (n.kind == NodeKind::Leaf) continue;
        if (!std::isfinite(n.threshold)) fail(ctx(n.id), "non-finite threshold");
        if (n.feature < 0 || n.feature >= num_features)
            fail(ctx(n.id), "feature index ", n.feature, " out of range [0, ", num_features, ")");
        if (n.left == n.right) fail(ctx(n.id), "children must be distinct");
        for (int child_id : {n.left, n.right}) {
            const Node* child = tree.find(child_id);
            if (!child) fail(ctx(n.id), "references missing child ", child_id);
            if (!seen.insert(child_id).second)
                fail(ctx(child_id), "reached from more than one parent");
            if (child->depth != n.depth + 1)
                fail(ctx(child_id), "depth ", child->depth, " does not follow parent depth ", n.depth);
            queue.push_back(child_id);
        }
    }
    if (seen.size() != tree.nodes.size())
        fail("tree ", tree_index, ": ", tree.nodes.size() - seen.size(),
             " node(s) unreachable from root");
}

inline void validate_ensemble(const Ensemble& ens) {
    if (ens.num_features < 1) fail("ensemble: num_features must be >= 1, got ", ens.num_features);
    for (std::size_t t = 0; t < ens.trees.size(); ++t)
        validate_tree(ens.trees[t], ens.num_features, static_cast<int>(t));
}

}  // namespace treg
