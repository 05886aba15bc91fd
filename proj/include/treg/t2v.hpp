#pragma once

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treg/ensemble.hpp"

namespace treg {

struct T2vConfig {
    int epsilon = 4;  // decimal digits kept when rounding thresholds
};

inline void validate(const T2vConfig& cfg) {
    if (cfg.epsilon < 0) fail("t2v: epsilon must be >= 0, got ", cfg.epsilon);
}

// Round half away from zero at `digits` decimals. Pinned so that dedup and the
// comparison bits are reproducible across runs.
inline double round_decimals(double x, int digits) {
    double scale = std::pow(10.0, digits);
    return std::round(x * scale) / scale;
}

struct ThresholdEntry {
    int feature = 0;
    double threshold = 0.0;  // already rounded

    bool operator==(const ThresholdEntry&) const = default;
    auto operator<=>(const ThresholdEntry&) const = default;
};

// The deduplicated (feature, rounded threshold) collection, sorted by
// (feature asc, threshold asc). Column j of U, element j of V and bit j of
// the T2V output all refer to entries[j].
struct ThresholdMap {
    std::vector<ThresholdEntry> entries;
    int num_features = 0;
};

inline ThresholdMap build_threshold_map(const Ensemble& ens, const T2vConfig& cfg = {}) {
    validate(cfg);
    std::set<std::pair<int, double>> seen;
    for (const Tree& tree : ens.trees) {
        for (const Node& n : tree.nodes) {
            if (n.kind != NodeKind::Split) continue;
            seen.emplace(n.feature, round_decimals(n.threshold, cfg.epsilon));
        }
    }
    ThresholdMap map;
    map.num_features = ens.num_features;
    map.entries.reserve(seen.size());
    for (const auto& [feature, threshold] : seen)
        map.entries.push_back({feature, threshold});
    return map;
}

inline int embed_dim(const ThresholdMap& map) { return static_cast<int>(map.entries.size()); }

// U is the m-by-k indicator matrix with a single 1 per column, V the matching
// threshold vector. cols[j] caches the nonzero row of column j so transforms
// can gather instead of running the dense product.
struct ProjectionPair {
    Mat U;
    Vec V;
    std::vector<int> cols;
};

inline ProjectionPair build_projection(const ThresholdMap& map) {
    const int m = map.num_features;
    const int k = embed_dim(map);
    ProjectionPair proj;
    proj.U = Mat::Zero(m, k);
    proj.V = Vec::Zero(k);
    proj.cols.resize(k);
    for (int j = 0; j < k; ++j) {
        const ThresholdEntry& e = map.entries[j];
        proj.U(e.feature, j) = 1.0;
        proj.V[j] = e.threshold;
        proj.cols[j] = e.feature;
    }
    return proj;
}

inline nlohmann::json threshold_map_to_json(const ThresholdMap& map) {
    nlohmann::json j;
    j["m"] = map.num_features;
    j["entries"] = nlohmann::json::array();
    for (const ThresholdEntry& e : map.entries)
        j["entries"].push_back({e.feature, e.threshold});
    return j;
}

inline ThresholdMap threshold_map_from_json(const nlohmann::json& j) {
    ThresholdMap map;
    try {
        map.num_features = j.at("m").get<int>();
        for (const auto& entry : j.at("entries")) {
            if (!entry.is_array() || entry.size() != 2)
                fail("t2v: map entry is not a [feature, threshold] pair");
            map.entries.push_back({entry[0].get<int>(), entry[1].get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        fail("t2v: bad threshold map json: ", e.what());
    }
    if (map.num_features < 1) fail("t2v: map needs num_features >= 1");
    for (const ThresholdEntry& e : map.entries)
        if (e.feature < 0 || e.feature >= map.num_features)
            fail("t2v: map entry feature ", e.feature, " outside 0..", map.num_features - 1);
    return map;
}

}  // namespace treg
