#include "evobank/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evobank {

namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_or_throw(std::span<const double> v) {
    const double n = std::sqrt(dot(v, v));
    if (n == 0.0) throw Error(ErrorKind::ZeroVector, "cosine similarity of a zero-norm embedding");
    return n;
}

void require_same_dimension(std::span<const Embedding> a, std::span<const Embedding> b) {
    if (a.empty() || b.empty()) return;
    const std::size_t dim = a.front().size();
    auto bad = [dim](const Embedding& e) { return e.size() != dim; };
    if (std::any_of(a.begin(), a.end(), bad) || std::any_of(b.begin(), b.end(), bad)) {
        throw Error(ErrorKind::DimensionMismatch, "embedding sets have different dimensions");
    }
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "cosine of unequal lengths");
    const double c = dot(a, b) / (norm_or_throw(a) * norm_or_throw(b));
    return std::clamp(c, -1.0, 1.0);
}

SimilarityMatrix negative_euclidean(std::span<const Embedding> points, double preference) {
    require_same_dimension(points, points);
    const std::size_t n = points.size();
    SimilarityMatrix sim{Matrix(n, n), preference};
    // upper triangle computed once and mirrored, so S is exactly symmetric
    for (std::size_t i = 0; i < n; ++i) {
        sim.values(i, i) = preference;
        for (std::size_t k = i + 1; k < n; ++k) {
            const double s = -euclidean_distance(points[i], points[k]);
            sim.values(i, k) = s;
            sim.values(k, i) = s;
        }
    }
    return sim;
}

SimilarityMatrix negative_euclidean(const Pool& pool, double preference) {
    return negative_euclidean(pool.embeddings(), preference);
}

CrossSimilarityMatrix cosine_cross(std::span<const Embedding> old_points,
                                   std::span<const Embedding> new_points) {
    require_same_dimension(old_points, new_points);
    std::vector<double> old_norm(old_points.size());
    std::vector<double> new_norm(new_points.size());
    for (std::size_t j = 0; j < old_points.size(); ++j) old_norm[j] = norm_or_throw(old_points[j]);
    for (std::size_t k = 0; k < new_points.size(); ++k) new_norm[k] = norm_or_throw(new_points[k]);

    CrossSimilarityMatrix out{Matrix(old_points.size(), new_points.size())};
    for (std::size_t j = 0; j < old_points.size(); ++j) {
        auto row = out.values.row(j);
        for (std::size_t k = 0; k < new_points.size(); ++k) {
            const double c = dot(old_points[j], new_points[k]) / (old_norm[j] * new_norm[k]);
            row[k] = std::clamp(c, -1.0, 1.0);
        }
    }
    return out;
}

double pairwise_cosine_max(std::span<const double> point, std::span<const Embedding> subset) {
    if (subset.empty()) throw Error(ErrorKind::EmptyPool, "pairwise_cosine_max on an empty subset");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& other : subset) best = std::max(best, cosine_similarity(point, other));
    return best;
}

}  // namespace evobank
