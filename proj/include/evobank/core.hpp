#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evobank {

enum class ErrorKind {
    InvalidConfig,
    DimensionMismatch,
    DuplicateId,
    NonFiniteValue,
    EmptyPool,
    ZeroVector,
    IndexOutOfRange,
    BudgetExceedsBank,
    BudgetExceedsPool,
    DegeneratePercentiles,
    DegenerateVector,
    ParseError,
    ChecksumMismatch,
    VersionUnsupported,
    CorruptHeader,
    LockHeld,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// All recoverable failures raised by the library carry a category.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

using Embedding = std::vector<double>;

struct CandidatePoint {
    std::string id;
    Embedding embedding;
    double quality = 0.0;
    std::string source;
    std::map<std::string, std::string> meta;

    bool operator==(const CandidatePoint&) const = default;
};

/// A non-empty list of candidates with a uniform embedding dimension,
/// unique ids and finite values. Only constructible through validate_pool.
class Pool {
public:
    Pool() = default;

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::span<const CandidatePoint> points() const noexcept { return points_; }
    const CandidatePoint& operator[](std::size_t i) const noexcept { return points_[i]; }

    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }

    [[nodiscard]] std::vector<Embedding> embeddings() const;
    [[nodiscard]] std::vector<double> qualities() const;
    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;

    std::vector<CandidatePoint> release() && { return std::move(points_); }

private:
    friend Pool validate_pool(std::vector<CandidatePoint>, std::optional<std::size_t>);
    friend Pool empty_pool(std::size_t);
    std::vector<CandidatePoint> points_;
    std::size_t dimension_ = 0;
};

/// Throws EmptyPool, DimensionMismatch, DuplicateId or NonFiniteValue.
/// When `dimension` is given every embedding must have that length.
Pool validate_pool(std::vector<CandidatePoint> points,
                   std::optional<std::size_t> dimension = std::nullopt);

/// A pool with no points; the only legal way to express "no new arrivals".
Pool empty_pool(std::size_t dimension);

enum class Combination { additive, multiplicative, nonlinear };

std::string_view to_string(Combination c) noexcept;
Combination parse_combination(std::string_view text);

struct EvolutionConfig {
    std::size_t bank_size = 6000;
    double alpha0 = 0.3;
    double lambda = 0.9;
    double beta = 0.5;
    double gamma = 1.0;
    Combination combination = Combination::multiplicative;
    // combiner applied to the mapped quality in nonlinear mode
    Combination nonlinear_base = Combination::multiplicative;
    double r_l = 0.3;
    double r_h = 0.95;
    std::size_t batch_size = 27000;
    int max_iters = 200;
    int stable_iters = 15;
    double preference = 0.0;
    std::uint64_t seed = 0;

    /// Throws InvalidConfig.
    void validate() const;

    bool operator==(const EvolutionConfig&) const = default;
};

struct BankEntry {
    CandidatePoint point;
    double s_rep = 0.0;
    double s_rep_norm = 0.0;
    double s_q_norm = 0.0;
    double overall = 0.0;
    std::size_t rank = 0;
    int round_added = 0;

    bool operator==(const BankEntry&) const = default;
};

/// Total order used everywhere for selection: overall descending, then id ascending.
inline bool ranks_before(double overall_a, std::string_view id_a, double overall_b,
                         std::string_view id_b) noexcept {
    if (overall_a != overall_b) return overall_a > overall_b;
    return id_a < id_b;
}

/// Throws IndexOutOfRange unless ranks are 1..n in order and overall is non-increasing.
void check_rank_permutation(std::span<const BankEntry> entries);

// Warnings (degenerate ranges, non-convergence) go through a replaceable sink.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace evobank
