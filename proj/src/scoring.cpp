#include "evobank/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evobank {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": input lengths differ");
}

}  // namespace

std::vector<double> representativeness(const Matrix& votes) {
    const std::size_t n = votes.rows();
    if (!votes.square()) throw Error(ErrorKind::DimensionMismatch, "representativeness: Z must be square");
    std::vector<double> received(n, 0.0);
    std::vector<double> cast(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = votes.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            received[k] += row[k];
            cast[i] += row[k];
        }
    }
    std::vector<double> score(n);
    for (std::size_t k = 0; k < n; ++k) score[k] = received[k] - cast[k] + votes(k, k);
    return score;
}

std::vector<double> representativeness(const MessageState& state) {
    const std::size_t n = state.size();
    Matrix z(n, n);
    auto a = state.availability.values();
    auto r = state.responsibility.values();
    auto out = z.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + r[i];
    return representativeness(z);
}

NormalizedScores normalize_scores(std::span<const double> s_rep, std::span<const double> s_q,
                                  std::span<const std::size_t> bank_members) {
    require_same_length(s_rep.size(), s_q.size(), "normalize_scores");
    if (s_rep.empty()) throw Error(ErrorKind::EmptyPool, "normalize_scores: no candidates");

    double rep_min = 0.0;
    if (bank_members.empty()) {
        rep_min = *std::min_element(s_rep.begin(), s_rep.end());
    } else {
        rep_min = s_rep[bank_members.front()];
        for (std::size_t idx : bank_members) {
            if (idx >= s_rep.size()) throw Error(ErrorKind::IndexOutOfRange, "normalize_scores: bank index out of range");
            rep_min = std::min(rep_min, s_rep[idx]);
        }
    }
    const double rep_max = *std::max_element(s_rep.begin(), s_rep.end());
    const auto [q_lo, q_hi] = std::minmax_element(s_q.begin(), s_q.end());
    const double q_min = *q_lo;
    const double q_max = *q_hi;

    NormalizedScores out{std::vector<double>(s_rep.size(), 0.0), std::vector<double>(s_q.size(), 0.0)};
    if (rep_max == rep_min) {
        warn("representativeness scores have a zero range; normalised diversity set to 0");
    } else {
        for (std::size_t i = 0; i < s_rep.size(); ++i) out.rep[i] = (s_rep[i] - rep_min) / (rep_max - rep_min);
    }
    if (q_max == q_min) {
        warn("quality scores have a zero range; normalised quality set to 0");
    } else {
        for (std::size_t i = 0; i < s_q.size(); ++i) out.quality[i] = (s_q[i] - q_min) / (q_max - q_min);
    }
    return out;
}

std::vector<double> combine_additive(std::span<const double> rep, std::span<const double> quality,
                                     double gamma) {
    require_same_length(rep.size(), quality.size(), "combine_additive");
    std::vector<double> out(rep.size());
    for (std::size_t i = 0; i < rep.size(); ++i) out[i] = rep[i] + gamma * quality[i];
    return out;
}

std::vector<double> combine_multiplicative(std::span<const double> rep,
                                           std::span<const double> quality, double gamma) {
    require_same_length(rep.size(), quality.size(), "combine_multiplicative");
    std::vector<double> out(rep.size());
    for (std::size_t i = 0; i < rep.size(); ++i) out[i] = (1.0 + rep[i]) * std::pow(1.0 + quality[i], gamma);
    return out;
}

double percentile(std::span<const double> values, double fraction) {
    if (values.empty()) throw Error(ErrorKind::EmptyPool, "percentile of an empty vector");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::clamp(fraction, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

QualityMapping nonlinear_quality_map(std::span<const double> quality_norm, double r_l, double r_h) {
    if (quality_norm.size() < 2) {
        throw Error(ErrorKind::DegeneratePercentiles, "nonlinear quality map needs at least two values");
    }
    if (!(r_l < r_h)) throw Error(ErrorKind::InvalidConfig, "nonlinear quality map: r_l must be below r_h");

    QualityMapping map;
    map.tau_low = percentile(quality_norm, r_l);
    map.tau_high = percentile(quality_norm, r_h);
    if (map.tau_high - map.tau_low < 1e-12) {
        throw Error(ErrorKind::DegeneratePercentiles, "quality percentiles coincide");
    }
    map.scale = 4.0 / (map.tau_high - map.tau_low);
    map.center = map.tau_low + 2.0 / map.scale;
    map.mapped.resize(quality_norm.size());
    for (std::size_t i = 0; i < quality_norm.size(); ++i) {
        map.mapped[i] = logistic((quality_norm[i] - map.center) * map.scale);
    }
    return map;
}

std::vector<double> combine_nonlinear(std::span<const double> rep, std::span<const double> mapped,
                                      double gamma, Combination base) {
    if (base == Combination::additive) return combine_additive(rep, mapped, gamma);
    return combine_multiplicative(rep, mapped, gamma);
}

ScoreVector score_candidates(std::span<const std::string> ids, std::span<const double> s_rep,
                             std::span<const double> s_q,
                             std::span<const std::size_t> bank_members,
                             const EvolutionConfig& config) {
    require_same_length(ids.size(), s_rep.size(), "score_candidates");
    const NormalizedScores norm = normalize_scores(s_rep, s_q, bank_members);

    std::vector<double> overall;
    std::vector<double> mapped;
    switch (config.combination) {
    case Combination::additive:
        overall = combine_additive(norm.rep, norm.quality, config.gamma);
        break;
    case Combination::multiplicative:
        overall = combine_multiplicative(norm.rep, norm.quality, config.gamma);
        break;
    case Combination::nonlinear:
        try {
            mapped = nonlinear_quality_map(norm.quality, config.r_l, config.r_h).mapped;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegeneratePercentiles) throw;
            warn(std::string(e.what()) + "; mapped quality set to 0.5");
            mapped.assign(norm.quality.size(), 0.5);
        }
        overall = combine_nonlinear(norm.rep, mapped, config.gamma, config.nonlinear_base);
        break;
    }

    ScoreVector out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& r = out[i];
        r.id = ids[i];
        r.s_rep = s_rep[i];
        r.s_rep_norm = norm.rep[i];
        r.s_q = s_q[i];
        r.s_q_norm = norm.quality[i];
        if (!mapped.empty()) r.s_q_mapped = mapped[i];
        r.overall = overall[i];
    }
    return out;
}

}  // namespace evobank
