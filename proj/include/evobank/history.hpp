#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evobank/geometry.hpp"
#include "evobank/matrix.hpp"

namespace evobank {

/// The persisted part of last round's final responsibility matrix.
///
/// Only bank rows (m x p) and bank columns (p x m) are kept: the top-right
/// estimate reads bank rows, the bottom-left estimate reads bank columns and
/// the top-left copy is their bank x bank intersection. Bank order here is
/// the order in which bank members lead the next round's candidate list.
struct HistoryBlocks {
    std::vector<std::string> participant_ids;
    std::vector<Embedding> participant_embeddings;
    std::vector<std::string> bank_ids;
    std::vector<std::size_t> bank_positions;  // participant index of each bank member
    Matrix bank_rows;                         // m x p
    Matrix bank_cols;                         // p x m

    [[nodiscard]] bool empty() const noexcept { return participant_ids.empty(); }
    [[nodiscard]] std::size_t bank_size() const noexcept { return bank_ids.size(); }
    [[nodiscard]] std::size_t participants() const noexcept { return participant_ids.size(); }
    [[nodiscard]] std::optional<std::size_t> bank_index(std::string_view id) const;

    /// bank x bank block taken from the bank rows.
    [[nodiscard]] Matrix bank_block() const;

    /// Throws DimensionMismatch / IndexOutOfRange when shapes or positions disagree,
    /// or when the two blocks differ by more than `tolerance` on their intersection.
    void validate(double tolerance = 1e-6) const;

    bool operator==(const HistoryBlocks&) const = default;
};

/// n x n estimate of the coming round's responsibilities, bank members first.
struct MomentumMatrix {
    Matrix values;
    std::size_t bank_count = 0;
    double fill = 0.0;  // bottom-right constant
};

/// Column weights of a cross-similarity matrix: negative cosines are clamped to 0
/// and each column is normalised to sum 1. A column with (clamped) mass below
/// 1e-12 falls back to uniform weights.
Matrix column_weights(const CrossSimilarityMatrix& sim, std::size_t* degenerate_columns = nullptr);

/// Suitability of each new point as exemplar for each bank member (m x q).
Matrix estimate_top_right(const Matrix& bank_rows, const CrossSimilarityMatrix& sim);

/// Suitability of each bank member as exemplar for each new point (q x m).
Matrix estimate_bottom_left(const Matrix& bank_cols, const CrossSimilarityMatrix& sim);

/// Median of a multiset; the mean of the two middle values for even counts.
double median(std::vector<double> values);

MomentumMatrix build_momentum(const HistoryBlocks& history, std::span<const Embedding> new_points);

Matrix history_aware_blend(const MomentumMatrix& momentum, const Matrix& fresh,
                           const Matrix& previous, double alpha, double beta);

/// alpha0 * decay^iteration, evaluated by repeated multiplication.
double momentum_alpha(double alpha0, double decay, int iteration) noexcept;

HistoryBlocks extract_history(const Matrix& final_responsibility,
                              std::span<const std::size_t> bank_positions,
                              std::vector<std::string> participant_ids,
                              std::vector<Embedding> participant_embeddings);

}  // namespace evobank
