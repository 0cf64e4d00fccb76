#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evobank/affinity.hpp"
#include "evobank/core.hpp"

namespace evobank {

struct ScoreRecord {
    std::string id;
    double s_rep = 0.0;
    double s_rep_norm = 0.0;
    double s_q = 0.0;
    double s_q_norm = 0.0;
    std::optional<double> s_q_mapped;
    double overall = 0.0;

    bool operator==(const ScoreRecord&) const = default;
};

using ScoreVector = std::vector<ScoreRecord>;

/// Votes received minus votes cast plus the self-vote, from Z = A + R:
/// s_k = sum_i Z[i,k] - sum_i Z[k,i] + Z[k,k].
std::vector<double> representativeness(const Matrix& votes);
std::vector<double> representativeness(const MessageState& state);

struct NormalizedScores {
    std::vector<double> rep;
    std::vector<double> quality;
};

/// Min-max scaling. Representativeness uses the minimum over `bank_members` (indices
/// into the score vectors; all candidates when empty) and the maximum over all
/// candidates, so values below the bank minimum come out negative. A zero range
/// yields zeros and a warning.
NormalizedScores normalize_scores(std::span<const double> s_rep, std::span<const double> s_q,
                                  std::span<const std::size_t> bank_members);

std::vector<double> combine_additive(std::span<const double> rep, std::span<const double> quality,
                                     double gamma);
std::vector<double> combine_multiplicative(std::span<const double> rep,
                                           std::span<const double> quality, double gamma);

/// Linear interpolation between closest ranks; fraction 0 -> min, 1 -> max.
double percentile(std::span<const double> values, double fraction);

struct QualityMapping {
    double tau_low = 0.0;
    double tau_high = 0.0;
    double scale = 0.0;   // 4 / (tau_high - tau_low)
    double center = 0.0;  // tau_low + 2 / scale
    std::vector<double> mapped;
};

/// Sigmoid over the [tau_low, tau_high] percentile band, mapping tau_low to
/// sigma(-2) and tau_high to sigma(2). Throws DegeneratePercentiles on a
/// band narrower than 1e-12.
QualityMapping nonlinear_quality_map(std::span<const double> quality_norm, double r_l, double r_h);

std::vector<double> combine_nonlinear(std::span<const double> rep, std::span<const double> mapped,
                                      double gamma,
                                      Combination base = Combination::multiplicative);

/// Full scoring of one batch of candidates under a configuration.
ScoreVector score_candidates(std::span<const std::string> ids, std::span<const double> s_rep,
                             std::span<const double> s_q,
                             std::span<const std::size_t> bank_members,
                             const EvolutionConfig& config);

inline double logistic(double x) noexcept {
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace evobank
