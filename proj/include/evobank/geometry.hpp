#pragma once

#include <span>

#include "evobank/core.hpp"
#include "evobank/matrix.hpp"

namespace evobank {

/// Negative Euclidean similarities with a scalar preference on the diagonal.
struct SimilarityMatrix {
    Matrix values;
    double preference = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return values.rows(); }
};

/// Cosine similarities between an old set (rows) and a new set (columns).
struct CrossSimilarityMatrix {
    Matrix values;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Throws ZeroVector if either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

SimilarityMatrix negative_euclidean(std::span<const Embedding> points, double preference = 0.0);
SimilarityMatrix negative_euclidean(const Pool& pool, double preference = 0.0);

CrossSimilarityMatrix cosine_cross(std::span<const Embedding> old_points,
                                   std::span<const Embedding> new_points);

/// Max cosine similarity of `point` against every member of a non-empty subset.
double pairwise_cosine_max(std::span<const double> point, std::span<const Embedding> subset);

}  // namespace evobank
