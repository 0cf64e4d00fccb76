#pragma once

#include <span>
#include <string>
#include <vector>

#include "evobank/core.hpp"
#include "evobank/scoring.hpp"

namespace evobank {

enum class DiversityMeasure { mean_pairwise, mean_nearest_neighbor };

struct SubsetStats {
    double mean_quality = 0.0;
    double mean_diversity = 0.0;  // Euclidean; see DiversityMeasure
    std::size_t size = 0;
};

SubsetStats subset_stats(std::span<const CandidatePoint> subset,
                         DiversityMeasure measure = DiversityMeasure::mean_pairwise);

std::size_t overlap_count(std::span<const std::string> a, std::span<const std::string> b);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws DegenerateVector when either
/// input is constant, DimensionMismatch on unequal or too short input.
double spearman(std::span<const double> x, std::span<const double> y);

struct SelectionCorrelation {
    double sp_quality = 0.0;
    double sp_diversity = 0.0;
    double diff = 0.0;  // sp_diversity - sp_quality
    std::size_t considered = 0;
};

/// Spearman correlation of quality and diversity with bank membership among
/// the `top_n` candidates by overall score.
SelectionCorrelation selection_correlation(const ScoreVector& scored,
                                           std::span<const std::string> bank_ids, std::size_t top_n);

/// Contiguous rank slices of near-equal size; earlier slices take the remainder.
std::vector<std::vector<BankEntry>> orderliness_slices(std::span<const BankEntry> bank,
                                                       std::size_t parts = 3);

}  // namespace evobank
