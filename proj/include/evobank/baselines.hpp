#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evobank/core.hpp"

namespace evobank {

struct SelectionResult {
    std::string strategy;
    std::vector<std::string> ids;  // selection order, or best score first
    std::vector<double> scores;    // per selected id; empty when the strategy has none
    bool shortfall = false;        // fewer than requested (threshold filtering only)
};

SelectionResult random_select(const Pool& pool, std::size_t m, std::uint64_t seed);

/// Distance of each point to its nearest other point.
std::vector<double> knn1_scores(const Pool& pool);

/// (1 + kNN1') * (1 + q')^gamma over min-max normalised scores, top-m.
SelectionResult knn1_select(const Pool& pool, std::size_t m, double gamma);

/// Greedy max-min selection. Scores hold each point's distance to the selected
/// set at the moment it was added; the start point gets the largest recorded
/// distance (or 0 when it is alone). Start defaults to the smallest id.
SelectionResult kcenter_greedy(const Pool& pool, std::size_t m,
                               std::optional<std::string> start_id = std::nullopt);

/// Greedy max-min over the whole pool for per-point scores, then combined with
/// quality like knn1_select.
SelectionResult kcenter_select(const Pool& pool, std::size_t m, double gamma,
                               std::optional<std::string> start_id = std::nullopt);

/// Quality-descending traversal keeping points whose max cosine similarity to
/// the selection stays below `threshold`.
SelectionResult deita_select(const Pool& pool, std::size_t m, double threshold = 0.9);

/// Top-m by representativeness score (aligned with the pool's order).
SelectionResult diversity_greedy(const Pool& pool, std::span<const double> s_rep, std::size_t m);

/// Top-m by raw quality.
SelectionResult quality_greedy(const Pool& pool, std::size_t m);

/// Top-m of a pool under arbitrary scores, ties by id.
std::vector<std::size_t> top_by_score(const Pool& pool, std::span<const double> scores, std::size_t m);

}  // namespace evobank
