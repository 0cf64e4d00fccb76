#include "evobank/evolution.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "evobank/geometry.hpp"

namespace evobank {

namespace {

struct BatchOutcome {
    std::vector<BankEntry> entries;
    HistoryBlocks history;
    ScoreVector scores;
};

// Interim bank ordered the way the history expects its bank members.
std::vector<const BankEntry*> bank_in_history_order(const std::vector<BankEntry>& entries,
                                                    const HistoryBlocks& history) {
    std::vector<const BankEntry*> ordered;
    ordered.reserve(entries.size());
    if (history.empty()) {
        for (const auto& e : entries) ordered.push_back(&e);
        return ordered;
    }
    if (history.bank_size() != entries.size()) {
        throw Error(ErrorKind::DimensionMismatch, "history bank size differs from the bank");
    }
    std::unordered_map<std::string_view, const BankEntry*> by_id;
    for (const auto& e : entries) by_id.emplace(e.point.id, &e);
    for (const auto& id : history.bank_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw Error(ErrorKind::IndexOutOfRange, "history refers to '" + id + "', which is not in the bank");
        }
        ordered.push_back(it->second);
    }
    return ordered;
}

BatchOutcome run_batch(const std::vector<BankEntry>& bank, const HistoryBlocks& history,
                       std::span<const CandidatePoint> arrivals, const EvolutionConfig& config,
                       int round, RoundTrace* trace) {
    const std::vector<const BankEntry*> carried = bank_in_history_order(bank, history);
    const std::size_t m_prev = carried.size();
    const std::size_t n = m_prev + arrivals.size();

    std::vector<const CandidatePoint*> points;
    points.reserve(n);
    for (const auto* e : carried) points.push_back(&e->point);
    for (const auto& p : arrivals) points.push_back(&p);

    std::vector<std::string> ids(n);
    std::vector<Embedding> embeddings(n);
    std::vector<double> quality(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = points[i]->id;
        embeddings[i] = points[i]->embedding;
        quality[i] = points[i]->quality;
    }

    const SimilarityMatrix similarity = negative_euclidean(embeddings, config.preference);
    const ApParams params{config.beta, config.max_iters, config.stable_iters};

    const bool with_history = !history.empty() && config.alpha0 > 0.0;
    MessageState state;
    if (with_history) {
        const std::span<const Embedding> fresh(embeddings.data() + m_prev, arrivals.size());
        const MomentumMatrix momentum = build_momentum(history, fresh);
        const Momentum schedule{&momentum.values, config.alpha0, config.lambda};
        state = run_ap(similarity, params, &schedule);
    } else {
        state = run_ap(similarity, params);
    }

    const std::vector<double> s_rep = representativeness(state);
    std::vector<std::size_t> bank_members(m_prev);
    std::iota(bank_members.begin(), bank_members.end(), std::size_t{0});
    ScoreVector scores = score_candidates(ids, s_rep, quality, bank_members, config);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranks_before(scores[a].overall, ids[a], scores[b].overall, ids[b]);
    });
    order.resize(std::min(config.bank_size, n));

    BatchOutcome out;
    out.entries.reserve(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        const std::size_t idx = order[r];
        BankEntry e;
        e.point = *points[idx];
        e.s_rep = scores[idx].s_rep;
        e.s_rep_norm = scores[idx].s_rep_norm;
        e.s_q_norm = scores[idx].s_q_norm;
        e.overall = scores[idx].overall;
        e.rank = r + 1;
        e.round_added = idx < m_prev ? carried[idx]->round_added : round;
        out.entries.push_back(std::move(e));
    }
    out.history = extract_history(state.responsibility, order, ids, std::move(embeddings));

    if (trace) {
        trace->batches.push_back({n, arrivals.size(), state.iteration, state.converged, with_history});
        if (trace->keep_messages) {
            trace->final_messages = std::move(state);
            trace->final_candidate_ids = ids;
        }
    }
    out.scores = std::move(scores);
    return out;
}

BankState run_round(BankState next, std::span<const CandidatePoint> arrivals, RoundTrace* trace) {
    const EvolutionConfig& config = next.config;
    std::size_t cursor = 0;
    bool first = true;
    while (first || cursor < arrivals.size()) {
        const std::size_t capacity = config.batch_size - next.entries.size();
        const std::size_t take = std::min(capacity, arrivals.size() - cursor);
        BatchOutcome batch = run_batch(next.entries, next.history, arrivals.subspan(cursor, take),
                                       config, next.round, trace);
        next.entries = std::move(batch.entries);
        next.history = std::move(batch.history);
        next.last_scores = std::move(batch.scores);
        cursor += take;
        first = false;
    }
    return next;
}

}  // namespace

BankState init_bank(const Pool& candidates, const EvolutionConfig& config, RoundTrace* trace) {
    config.validate();
    if (candidates.empty()) throw Error(ErrorKind::EmptyPool, "init_bank: no candidates");
    BankState state;
    state.config = config;
    state.dimension = candidates.dimension();
    state.round = 0;
    return run_round(std::move(state), candidates.points(), trace);
}

BankState evolve_round(const BankState& bank, const Pool& new_candidates, RoundTrace* trace) {
    bank.config.validate();
    if (bank.entries.empty() && new_candidates.empty()) {
        throw Error(ErrorKind::EmptyPool, "evolve_round: empty bank and no new candidates");
    }
    if (!new_candidates.empty() && new_candidates.dimension() != bank.dimension) {
        throw Error(ErrorKind::DimensionMismatch,
                    "new candidates have dimension " + std::to_string(new_candidates.dimension()) +
                        ", bank has " + std::to_string(bank.dimension));
    }
    std::unordered_set<std::string_view> bank_ids;
    for (const auto& e : bank.entries) bank_ids.insert(e.point.id);
    for (const auto& p : new_candidates) {
        if (bank_ids.contains(p.id)) {
            throw Error(ErrorKind::DuplicateId, "new candidate '" + p.id + "' is already in the bank");
        }
    }

    BankState next;
    next.entries = bank.entries;
    next.history = bank.history;
    next.config = bank.config;
    next.dimension = bank.dimension;
    next.round = bank.round + 1;
    return run_round(std::move(next), new_candidates.points(), trace);
}

void rank_bank(std::vector<BankEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const BankEntry& a, const BankEntry& b) {
        return ranks_before(a.overall, a.point.id, b.overall, b.point.id);
    });
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = i + 1;
}

std::vector<CandidatePoint> extract_budget(const BankState& bank, std::size_t k) {
    if (k == 0) throw Error(ErrorKind::InvalidConfig, "budget must be at least 1");
    if (k > bank.entries.size()) {
        throw Error(ErrorKind::BudgetExceedsBank,
                    "budget " + std::to_string(k) + " exceeds bank size " + std::to_string(bank.entries.size()));
    }
    std::vector<CandidatePoint> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(bank.entries[i].point);
    return out;
}

}  // namespace evobank
