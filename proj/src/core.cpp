#include "evobank/core.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <unordered_set>

namespace evobank {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::EmptyPool: return "EmptyPool";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::BudgetExceedsBank: return "BudgetExceedsBank";
    case ErrorKind::BudgetExceedsPool: return "BudgetExceedsPool";
    case ErrorKind::DegeneratePercentiles: return "DegeneratePercentiles";
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::VersionUnsupported: return "VersionUnsupported";
    case ErrorKind::CorruptHeader: return "CorruptHeader";
    case ErrorKind::LockHeld: return "LockHeld";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

std::vector<Embedding> Pool::embeddings() const {
    std::vector<Embedding> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.embedding);
    return out;
}

std::vector<double> Pool::qualities() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.quality);
    return out;
}

std::optional<std::size_t> Pool::find(std::string_view id) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i].id == id) return i;
    }
    return std::nullopt;
}

Pool validate_pool(std::vector<CandidatePoint> points, std::optional<std::size_t> dimension) {
    if (points.empty()) throw Error(ErrorKind::EmptyPool, "candidate pool is empty");

    const std::size_t dim = dimension.value_or(points.front().embedding.size());
    if (dim == 0) throw Error(ErrorKind::DimensionMismatch, "embedding dimension must be positive");

    std::unordered_set<std::string_view> seen;
    seen.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.embedding.size() != dim) {
            throw Error(ErrorKind::DimensionMismatch,
                        "point '" + p.id + "' has dimension " + std::to_string(p.embedding.size()) +
                            ", expected " + std::to_string(dim));
        }
        if (!seen.insert(p.id).second) {
            throw Error(ErrorKind::DuplicateId, "duplicate id '" + p.id + "'");
        }
        for (double v : p.embedding) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteValue,
                            "point '" + p.id + "' has a non-finite embedding value");
            }
        }
        if (!std::isfinite(p.quality)) {
            throw Error(ErrorKind::NonFiniteValue, "point '" + p.id + "' has non-finite quality");
        }
    }

    Pool pool;
    pool.points_ = std::move(points);
    pool.dimension_ = dim;
    return pool;
}

Pool empty_pool(std::size_t dimension) {
    Pool pool;
    pool.dimension_ = dimension;
    return pool;
}

std::string_view to_string(Combination c) noexcept {
    switch (c) {
    case Combination::additive: return "add";
    case Combination::multiplicative: return "mul";
    case Combination::nonlinear: return "nonlinear";
    }
    return "mul";
}

Combination parse_combination(std::string_view text) {
    if (text == "add" || text == "additive") return Combination::additive;
    if (text == "mul" || text == "multiplicative") return Combination::multiplicative;
    if (text == "nonlinear") return Combination::nonlinear;
    throw Error(ErrorKind::InvalidConfig, "unknown combination '" + std::string(text) + "'");
}

void EvolutionConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
    if (bank_size == 0) fail("bank_size must be positive");
    if (!(alpha0 >= 0.0 && alpha0 <= 1.0)) fail("alpha0 must lie in [0,1]");
    if (!(lambda > 0.0 && lambda <= 1.0)) fail("lambda must lie in (0,1]");
    // beta = 1 is accepted as "no damping"; used by the plain-AP identities.
    if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0,1]");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be a finite value >= 0");
    if (!(r_l > 0.0 && r_l < 1.0) || !(r_h > 0.0 && r_h < 1.0)) fail("r_l and r_h must lie in (0,1)");
    if (!(r_l < r_h)) fail("r_l must be strictly below r_h");
    if (nonlinear_base == Combination::nonlinear) fail("nonlinear_base must be add or mul");
    if (batch_size == 0) fail("batch_size must be positive");
    if (batch_size <= bank_size) fail("batch_size must exceed bank_size");
    if (max_iters < 0) fail("max_iters must be >= 0");
    if (stable_iters <= 0) fail("stable_iters must be positive");
    if (!std::isfinite(preference)) fail("preference must be finite");
}

void check_rank_permutation(std::span<const BankEntry> entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].rank != i + 1) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "entry '" + entries[i].point.id + "' has rank " +
                            std::to_string(entries[i].rank) + ", expected " + std::to_string(i + 1));
        }
        if (i > 0 && !ranks_before(entries[i - 1].overall, entries[i - 1].point.id,
                                   entries[i].overall, entries[i].point.id)) {
            throw Error(ErrorKind::IndexOutOfRange, "entries are not sorted by overall score");
        }
    }
}

namespace {

std::mutex sink_mutex;
WarningSink& sink() {
    static WarningSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
    std::lock_guard lock(sink_mutex);
    sink() = s ? std::move(s) : [](std::string_view) {};
}

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    sink()(message);
}

}  // namespace evobank
