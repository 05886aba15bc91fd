#pragma once

#include <vector>

#include <json.hpp>

#include "treg/ensemble.hpp"

namespace treg {

struct T2tConfig {
    double tau = 0.5;   // fill for pseudo / non-splitting completed-tree slots
    double eta = -1.0;  // tail padding up to the ensemble-wide token length
};

inline void validate(const T2tConfig& cfg) {
    if (cfg.tau == 0.0 || cfg.tau == 1.0)
        fail("t2t: tau must differ from the comparison bits 0/1");
    if (cfg.eta == 0.0 || cfg.eta == 1.0 || cfg.eta == cfg.tau)
        fail("t2t: eta must differ from 0, 1 and tau");
}

enum class SlotKind { Compare, Pseudo, Pad };

struct SlotSpec {
    SlotKind kind = SlotKind::Pad;
    int feature = -1;         // Compare only
    double threshold = 0.0;   // Compare only

    bool operator==(const SlotSpec&) const = default;
};

// Per-tree token layouts: each tree completed to its own max split depth and
// enumerated in level order (heap positions 1..2^(D+1)-1), then padded to the
// ensemble-wide maximum k.
struct TokenLayout {
    int d = 0;  // number of trees
    int k = 0;  // token length
    std::vector<std::vector<SlotSpec>> slots;  // d entries, each of length k
};

namespace t2t_detail {

// Level-order slots of one tree before tail padding. Leaf-only trees complete
// to length 0. Split nodes emit comparisons; every other completed-tree
// position (leaf or absent) is a pseudo slot.
inline std::vector<SlotSpec> tree_slots(const Tree& tree) {
    const TreeStats stats = tree_stats(tree);
    if (stats.max_split_depth < 0) return {};
    if (stats.max_split_depth > 25)
        fail("t2t: split depth ", stats.max_split_depth, " makes the completed tree too large");
    const long completed_len = (1L << (stats.max_split_depth + 1)) - 1;

    std::vector<SlotSpec> slots(static_cast<std::size_t>(completed_len),
                                SlotSpec{SlotKind::Pseudo, -1, 0.0});

    // pair: (node id, 1-based heap position); children of p sit at 2p, 2p+1.
    std::vector<std::pair<int, long>> frontier{{tree.root_id, 1}};
    while (!frontier.empty()) {
        auto [id, pos] = frontier.back();
        frontier.pop_back();
        const Node& n = tree.node(id);
        if (n.kind != NodeKind::Split) continue;
        slots[pos - 1] = SlotSpec{SlotKind::Compare, n.feature, n.threshold};
        if (2 * pos + 1 <= completed_len) {
            frontier.emplace_back(n.left, 2 * pos);
            frontier.emplace_back(n.right, 2 * pos + 1);
        }
    }
    return slots;
}

}  // namespace t2t_detail

inline TokenLayout build_token_layout(const Ensemble& ens, const T2tConfig& cfg = {}) {
    validate(cfg);
    if (ens.trees.empty()) fail("t2t: ensemble has no trees");

    TokenLayout layout;
    layout.d = static_cast<int>(ens.trees.size());
    for (const Tree& tree : ens.trees) {
        layout.slots.push_back(t2t_detail::tree_slots(tree));
        layout.k = std::max(layout.k, static_cast<int>(layout.slots.back().size()));
    }
    for (auto& slots : layout.slots)
        slots.resize(static_cast<std::size_t>(layout.k), SlotSpec{SlotKind::Pad, -1, 0.0});
    return layout;
}

inline std::pair<int, int> token_dims(const TokenLayout& layout) {
    return {layout.d, layout.k};
}

inline nlohmann::json token_layout_to_json(const TokenLayout& layout) {
    nlohmann::json j;
    j["d"] = layout.d;
    j["k"] = layout.k;
    j["trees"] = nlohmann::json::array();
    for (const auto& slots : layout.slots) {
        nlohmann::json jt = nlohmann::json::array();
        for (const SlotSpec& s : slots) {
            nlohmann::json js;
            switch (s.kind) {
                case SlotKind::Compare:
                    js["kind"] = "cmp";
                    js["feature"] = s.feature;
                    js["threshold"] = s.threshold;
                    break;
                case SlotKind::Pseudo: js["kind"] = "psd"; break;
                case SlotKind::Pad: js["kind"] = "pad"; break;
            }
            jt.push_back(std::move(js));
        }
        j["trees"].push_back(std::move(jt));
    }
    return j;
}

inline TokenLayout token_layout_from_json(const nlohmann::json& j) {
    TokenLayout layout;
    try {
        layout.d = j.at("d").get<int>();
        layout.k = j.at("k").get<int>();
        for (const auto& jt : j.at("trees")) {
            std::vector<SlotSpec> slots;
            for (const auto& js : jt) {
                const std::string kind = js.at("kind").get<std::string>();
                if (kind == "cmp")
                    slots.push_back({SlotKind::Compare, js.at("feature").get<int>(),
                                     js.at("threshold").get<double>()});
                else if (kind == "psd")
                    slots.push_back({SlotKind::Pseudo, -1, 0.0});
                else if (kind == "pad")
                    slots.push_back({SlotKind::Pad, -1, 0.0});
                else
                    fail("t2t: unknown slot kind '", kind, "'");
            }
            layout.slots.push_back(std::move(slots));
        }
    } catch (const nlohmann::json::exception& e) {
        fail("t2t: bad token layout json: ", e.what());
    }
    if (layout.d < 1 || layout.k < 1 || static_cast<int>(layout.slots.size()) != layout.d)
        fail("t2t: layout dims do not match its trees");
    for (const auto& slots : layout.slots)
        if (static_cast<int>(slots.size()) != layout.k)
            fail("t2t: tree with ", slots.size(), " slots in a k=", layout.k, " layout");
    return layout;
}

}  // namespace treg
