#pragma once

#include <cctype>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "treg/ensemble.hpp"

namespace treg {

namespace io_detail {

using nlohmann::json;

inline int parse_feature_name(const json& split, int tree_index, int node_id) {
    auto bad = [&]() {
        fail("tree ", tree_index, ", node ", node_id, ": unknown feature-name format ",
             split.dump());
    };
    if (split.is_number_integer()) return split.get<int>();
    if (!split.is_string()) bad();
    std::string s = split.get<std::string>();
    std::size_t start = 0;
    if (!s.empty() && (s[0] == 'f' || s[0] == 'F')) start = 1;
    if (start >= s.size()) bad();
    for (std::size_t i = start; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad();
    return std::stoi(s.substr(start));
}

inline void walk_booster_node(const json& jn, int depth, int tree_index, Tree& out,
                              int& max_feature) {
    auto ctx = [&](int id) { return msg("tree ", tree_index, ", node ", id, ": "); };
    if (!jn.is_object() || !jn.contains("nodeid"))
        fail("tree ", tree_index, ": node object missing nodeid");
    int id = jn.at("nodeid").get<int>();

    if (jn.contains("leaf")) {
        double v = jn.at("leaf").get<double>();
        if (!std::isfinite(v)) fail(ctx(id), "non-finite leaf value");
        out.nodes.push_back(make_leaf(id, v, depth));
        return;
    }

    if (!jn.contains("split") || !jn.contains("split_condition"))
        fail(ctx(id), "split node missing split/split_condition");
    int feature = parse_feature_name(jn.at("split"), tree_index, id);
    if (!jn.at("split_condition").is_number())
        fail(ctx(id), "non-finite threshold");
    double threshold = jn.at("split_condition").get<double>();
    if (!std::isfinite(threshold)) fail(ctx(id), "non-finite threshold");
    int yes = jn.at("yes").get<int>();
    int no = jn.at("no").get<int>();
    // "missing" branch is parsed but unused: rows are zero-imputed at ingestion.
    max_feature = std::max(max_feature, feature);

    // x < threshold routes to the "yes" branch, so yes = left.
    out.nodes.push_back(make_split(id, feature, threshold, yes, no, depth));

    if (!jn.contains("children") || !jn.at("children").is_array())
        fail(ctx(id), "split node has no children array");
    std::unordered_set<int> child_ids;
    for (const json& child : jn.at("children")) {
        if (child.is_object() && child.contains("nodeid"))
            child_ids.insert(child.at("nodeid").get<int>());
    }
    for (int want : {yes, no})
        if (!child_ids.count(want)) fail(ctx(id), "references missing child ", want);
    for (const json& child : jn.at("children"))
        walk_booster_node(child, depth + 1, tree_index, out, max_feature);
}

}  // namespace io_detail

// Parses the standard booster JSON dump (array of nested tree objects).
// num_features defaults to 1 + the largest feature index seen; pass an
// explicit override when the dump omits trailing unused features.
inline Ensemble parse_booster_dump(const std::string& text, int num_features_override = -1) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail("malformed JSON: ", e.what());
    }
    if (!root.is_array()) fail("booster dump must be a JSON array of trees");

    Ensemble ens;
    int max_feature = -1;
    int tree_index = 0;
    for (const nlohmann::json& jt : root) {
        Tree tree;
        io_detail::walk_booster_node(jt, 0, tree_index, tree, max_feature);
        tree.root_id = tree.nodes.front().id;
        sort_nodes(tree);
        ens.trees.push_back(std::move(tree));
        ++tree_index;
    }
    ens.num_features = num_features_override >= 1 ? num_features_override
                                                  : std::max(max_feature + 1, 1);
    validate_ensemble(ens);
    return ens;
}

inline Ensemble parse_internal(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail("malformed JSON: ", e.what());
    }
    if (!root.is_object() || !root.contains("num_features") || !root.contains("trees"))
        fail("internal model: expected object with num_features and trees");

    Ensemble ens;
    ens.num_features = root.at("num_features").get<int>();
    int tree_index = 0;
    for (const nlohmann::json& jt : root.at("trees")) {
        Tree tree;
        std::unordered_set<int> referenced;
        if (!jt.is_object() || !jt.contains("nodes"))
            fail("tree ", tree_index, ": missing nodes array");
        for (const nlohmann::json& jn : jt.at("nodes")) {
            int id = jn.at("id").get<int>();
            if (jn.contains("leaf")) {
                tree.nodes.push_back(make_leaf(id, jn.at("leaf").get<double>()));
            } else {
                if (!jn.at("threshold").is_number())
                    fail("tree ", tree_index, ", node ", id, ": non-finite threshold");
                tree.nodes.push_back(make_split(id, jn.at("feature").get<int>(),
                                                jn.at("threshold").get<double>(),
                                                jn.at("left").get<int>(),
                                                jn.at("right").get<int>()));
                referenced.insert(jn.at("left").get<int>());
                referenced.insert(jn.at("right").get<int>());
            }
        }
        if (tree.nodes.empty()) fail("tree ", tree_index, ": has no nodes");
        sort_nodes(tree);

        // The root is the unique node no split refers to.
        int root_id = -1;
        int roots = 0;
        for (const Node& n : tree.nodes) {
            if (!referenced.count(n.id)) {
                root_id = n.id;
                ++roots;
            }
        }
        if (roots != 1)
            fail("tree ", tree_index, ": expected exactly one root, found ", roots);
        tree.root_id = root_id;
        assign_depths(tree);
        ens.trees.push_back(std::move(tree));
        ++tree_index;
    }
    validate_ensemble(ens);
    return ens;
}

inline std::string serialize_internal(const Ensemble& ens, int indent = -1) {
    nlohmann::json root;
    root["num_features"] = ens.num_features;
    root["trees"] = nlohmann::json::array();
    for (const Tree& tree : ens.trees) {
        nlohmann::json jt;
        jt["nodes"] = nlohmann::json::array();
        for (const Node& n : tree.nodes) {
            nlohmann::json jn;
            jn["id"] = n.id;
            if (n.kind == NodeKind::Leaf) {
                jn["leaf"] = n.leaf_value;
            } else {
                jn["feature"] = n.feature;
                jn["threshold"] = n.threshold;
                jn["left"] = n.left;
                jn["right"] = n.right;
            }
            jt["nodes"].push_back(std::move(jn));
        }
        root["trees"].push_back(std::move(jt));
    }
    return root.dump(indent);
}

}  // namespace treg
