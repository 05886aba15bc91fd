#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "treg/common.hpp"

namespace treg {

// Rank-based (Mann-Whitney) AUC with half credit for ties:
// P(score+ > score-) + 0.5 P(score+ == score-).
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        fail("auc: ", scores.size(), " scores vs ", labels.size(), " labels");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int y : labels) n_pos += (y != 0);
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) fail("auc: needs at least one positive and one negative");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks within tie groups, then U = sum of positive ranks - n+(n+ + 1)/2.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]] != 0) rank_sum_pos += avg_rank;
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double accuracy(const std::vector<int>& preds, const std::vector<int>& labels) {
    if (preds.size() != labels.size())
        fail("accuracy: ", preds.size(), " predictions vs ", labels.size(), " labels");
    if (preds.empty()) fail("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += (preds[i] == labels[i]);
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace treg
