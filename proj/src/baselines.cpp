#include "evobank/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "evobank/geometry.hpp"
#include "evobank/scoring.hpp"

namespace evobank {

namespace {

void require_budget(const Pool& pool, std::size_t m) {
    if (m > pool.size()) {
        throw Error(ErrorKind::BudgetExceedsPool,
                    "requested " + std::to_string(m) + " points from a pool of " + std::to_string(pool.size()));
    }
}

std::vector<double> min_max(std::span<const double> v, const char* what) {
    std::vector<double> out(v.size(), 0.0);
    if (v.empty()) return out;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi == *lo) {
        warn(std::string(what) + " has a zero range; normalised to 0");
        return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / (*hi - *lo);
    return out;
}

SelectionResult combined_select(const Pool& pool, std::span<const double> diversity, std::size_t m,
                                double gamma, std::string strategy) {
    const auto d = min_max(diversity, "diversity score");
    const auto q = min_max(pool.qualities(), "quality score");
    const auto overall = combine_multiplicative(d, q, gamma);
    SelectionResult out{std::move(strategy), {}, {}, false};
    for (std::size_t idx : top_by_score(pool, overall, m)) {
        out.ids.push_back(pool[idx].id);
        out.scores.push_back(overall[idx]);
    }
    return out;
}

std::size_t start_index(const Pool& pool, const std::optional<std::string>& start_id) {
    if (start_id) {
        auto idx = pool.find(*start_id);
        if (!idx) throw Error(ErrorKind::IndexOutOfRange, "start id '" + *start_id + "' is not in the pool");
        return *idx;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
        if (pool[i].id < pool[best].id) best = i;
    }
    return best;
}

// Full greedy max-min order of `count` points with the distance at selection time.
std::pair<std::vector<std::size_t>, std::vector<double>> greedy_order(const Pool& pool, std::size_t count,
                                                                      std::size_t start) {
    const std::size_t n = pool.size();
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> taken(n, 0);
    std::vector<std::size_t> order;
    std::vector<double> radius;
    order.reserve(count);
    radius.reserve(count);

    std::size_t next = start;
    double next_radius = 0.0;
    while (order.size() < count) {
        order.push_back(next);
        radius.push_back(next_radius);
        taken[next] = 1;
        const auto& added = pool[next].embedding;
        std::size_t best = n;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            nearest[i] = std::min(nearest[i], euclidean_distance(pool[i].embedding, added));
            // strict > keeps the first index on ties
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        if (best == n) break;
        next = best;
        next_radius = best_d;
    }
    if (radius.size() > 1) radius[0] = *std::max_element(radius.begin() + 1, radius.end());
    return {order, radius};
}

}  // namespace

std::vector<std::size_t> top_by_score(const Pool& pool, std::span<const double> scores, std::size_t m) {
    require_budget(pool, m);
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(scores[a], pool[a].id, scores[b], pool[b].id);
    });
    idx.resize(m);
    return idx;
}

SelectionResult random_select(const Pool& pool, std::size_t m, std::uint64_t seed) {
    require_budget(pool, m);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    SelectionResult out{"random", {}, {}, false};
    for (std::size_t i = 0; i < m; ++i) out.ids.push_back(pool[idx[i]].id);
    return out;
}

std::vector<double> knn1_scores(const Pool& pool) {
    const std::size_t n = pool.size();
    if (n < 2) throw Error(ErrorKind::EmptyPool, "kNN1 needs at least two points");
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = euclidean_distance(pool[i].embedding, pool[j].embedding);
            best[i] = std::min(best[i], d);
            best[j] = std::min(best[j], d);
        }
    }
    return best;
}

SelectionResult knn1_select(const Pool& pool, std::size_t m, double gamma) {
    require_budget(pool, m);
    return combined_select(pool, knn1_scores(pool), m, gamma, "knn1");
}

SelectionResult kcenter_greedy(const Pool& pool, std::size_t m, std::optional<std::string> start_id) {
    require_budget(pool, m);
    SelectionResult out{"kcenter", {}, {}, false};
    if (m == 0) return out;
    auto [order, radius] = greedy_order(pool, m, start_index(pool, start_id));
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.ids.push_back(pool[order[i]].id);
        out.scores.push_back(radius[i]);
    }
    return out;
}

SelectionResult kcenter_select(const Pool& pool, std::size_t m, double gamma,
                               std::optional<std::string> start_id) {
    require_budget(pool, m);
    auto [order, radius] = greedy_order(pool, pool.size(), start_index(pool, start_id));
    std::vector<double> diversity(pool.size(), 0.0);
    for (std::size_t i = 0; i < order.size(); ++i) diversity[order[i]] = radius[i];
    return combined_select(pool, diversity, m, gamma, "kcenter");
}

SelectionResult deita_select(const Pool& pool, std::size_t m, double threshold) {
    require_budget(pool, m);
    const auto q = pool.qualities();
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(q[a], pool[a].id, q[b], pool[b].id);
    });

    SelectionResult out{"deita", {}, {}, false};
    std::vector<Embedding> selected;
    for (std::size_t idx : order) {
        if (out.ids.size() == m) break;
        const auto& e = pool[idx].embedding;
        if (!selected.empty() && !(pairwise_cosine_max(e, selected) < threshold)) continue;
        selected.push_back(e);
        out.ids.push_back(pool[idx].id);
        out.scores.push_back(q[idx]);
    }
    out.shortfall = out.ids.size() < m;
    return out;
}

SelectionResult diversity_greedy(const Pool& pool, std::span<const double> s_rep, std::size_t m) {
    if (s_rep.size() != pool.size()) throw Error(ErrorKind::DimensionMismatch, "diversity_greedy: score count differs from pool");
    SelectionResult out{"dg", {}, {}, false};
    for (std::size_t idx : top_by_score(pool, s_rep, m)) {
        out.ids.push_back(pool[idx].id);
        out.scores.push_back(s_rep[idx]);
    }
    return out;
}

SelectionResult quality_greedy(const Pool& pool, std::size_t m) {
    const auto q = pool.qualities();
    SelectionResult out{"qg", {}, {}, false};
    for (std::size_t idx : top_by_score(pool, q, m)) {
        out.ids.push_back(pool[idx].id);
        out.scores.push_back(q[idx]);
    }
    return out;
}

}  // namespace evobank
