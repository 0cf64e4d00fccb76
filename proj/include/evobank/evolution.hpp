#pragma once

#include <optional>
#include <vector>

#include "evobank/affinity.hpp"
#include "evobank/core.hpp"
#include "evobank/history.hpp"
#include "evobank/scoring.hpp"

namespace evobank {

/// The ranked bank after a completed round, with the history that the next
/// round's momentum is built from.
struct BankState {
    std::vector<BankEntry> entries;  // rank order
    HistoryBlocks history;
    int round = 0;
    EvolutionConfig config;
    std::size_t dimension = 0;
    ScoreVector last_scores;  // every candidate of the final batch, candidate order

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    bool operator==(const BankState&) const = default;
};

struct BatchSummary {
    std::size_t candidates = 0;
    std::size_t new_points = 0;
    int iterations = 0;
    bool converged = false;
    bool used_history = false;
};

/// Optional diagnostics of one round. The final batch's messages are kept
/// only when `keep_messages` is set.
struct RoundTrace {
    bool keep_messages = false;
    std::vector<BatchSummary> batches;
    std::optional<MessageState> final_messages;
    std::vector<std::string> final_candidate_ids;
};

/// Round 0: selection over `candidates` with no history.
BankState init_bank(const Pool& candidates, const EvolutionConfig& config,
                    RoundTrace* trace = nullptr);

/// One evolution round over the current bank plus `new_candidates`.
///
/// Candidates are processed in batches of at most config.batch_size points:
/// every batch holds the interim bank followed by the next slice of new
/// points in input order, and each batch's top-m becomes the interim bank of
/// the next one. History is chained the same way, so batch b is built on the
/// responsibilities of batch b-1 (or of the previous round for b = 0).
BankState evolve_round(const BankState& bank, const Pool& new_candidates,
                       RoundTrace* trace = nullptr);

/// Sort by overall descending (ties: id ascending) and assign ranks 1..n.
void rank_bank(std::vector<BankEntry>& entries);

/// The top-k entries' points. Throws BudgetExceedsBank when k > bank size.
std::vector<CandidatePoint> extract_budget(const BankState& bank, std::size_t k);

}  // namespace evobank
