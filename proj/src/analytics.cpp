#include "evobank/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "evobank/geometry.hpp"

namespace evobank {

SubsetStats subset_stats(std::span<const CandidatePoint> subset, DiversityMeasure measure) {
    if (subset.empty()) throw Error(ErrorKind::EmptyPool, "subset_stats on an empty subset");
    const std::size_t n = subset.size();
    SubsetStats s;
    s.size = n;
    for (const auto& p : subset) s.mean_quality += p.quality;
    s.mean_quality /= static_cast<double>(n);
    if (n == 1) return s;

    if (measure == DiversityMeasure::mean_pairwise) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) total += euclidean_distance(subset[i].embedding, subset[j].embedding);
        }
        s.mean_diversity = total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
    } else {
        std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = euclidean_distance(subset[i].embedding, subset[j].embedding);
                nearest[i] = std::min(nearest[i], d);
                nearest[j] = std::min(nearest[j], d);
            }
        }
        s.mean_diversity = std::accumulate(nearest.begin(), nearest.end(), 0.0) / static_cast<double>(n);
    }
    return s;
}

std::size_t overlap_count(std::span<const std::string> a, std::span<const std::string> b) {
    std::unordered_set<std::string_view> left(a.begin(), a.end());
    std::unordered_set<std::string_view> right(b.begin(), b.end());
    std::size_t count = 0;
    for (auto id : right) count += left.contains(id) ? 1 : 0;
    return count;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error(ErrorKind::DimensionMismatch, "spearman needs two equal-length vectors of length >= 2");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::DegenerateVector, "spearman of a constant vector is undefined");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SelectionCorrelation selection_correlation(const ScoreVector& scored,
                                           std::span<const std::string> bank_ids, std::size_t top_n) {
    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(scored[a].overall, scored[a].id, scored[b].overall, scored[b].id);
    });
    order.resize(std::min(top_n, order.size()));

    std::unordered_set<std::string_view> bank(bank_ids.begin(), bank_ids.end());
    std::vector<double> quality, diversity, flag;
    for (std::size_t idx : order) {
        quality.push_back(scored[idx].s_q_norm);
        diversity.push_back(scored[idx].s_rep_norm);
        flag.push_back(bank.contains(scored[idx].id) ? 1.0 : 0.0);
    }
    SelectionCorrelation out;
    out.considered = order.size();
    out.sp_quality = spearman(quality, flag);
    out.sp_diversity = spearman(diversity, flag);
    out.diff = out.sp_diversity - out.sp_quality;
    return out;
}

std::vector<std::vector<BankEntry>> orderliness_slices(std::span<const BankEntry> bank, std::size_t parts) {
    if (parts < 2) throw Error(ErrorKind::InvalidConfig, "orderliness needs at least two slices");
    std::vector<std::vector<BankEntry>> slices(parts);
    const std::size_t base = bank.size() / parts;
    const std::size_t extra = bank.size() % parts;
    std::size_t cursor = 0;
    for (std::size_t s = 0; s < parts; ++s) {
        const std::size_t len = base + (s < extra ? 1 : 0);
        slices[s].assign(bank.begin() + static_cast<std::ptrdiff_t>(cursor),
                         bank.begin() + static_cast<std::ptrdiff_t>(cursor + len));
        cursor += len;
    }
    return slices;
}

}  // namespace evobank
