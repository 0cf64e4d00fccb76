#include "evobank/history.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evobank/affinity.hpp"

namespace evobank {

std::optional<std::size_t> HistoryBlocks::bank_index(std::string_view id) const {
    for (std::size_t j = 0; j < bank_ids.size(); ++j) {
        if (bank_ids[j] == id) return j;
    }
    return std::nullopt;
}

Matrix HistoryBlocks::bank_block() const {
    const std::size_t m = bank_size();
    Matrix block(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) block(i, j) = bank_rows(i, bank_positions[j]);
    }
    return block;
}

void HistoryBlocks::validate(double tolerance) const {
    const std::size_t m = bank_size();
    const std::size_t p = participants();
    auto fail = [](ErrorKind k, const std::string& msg) { throw Error(k, "history: " + msg); };
    if (participant_embeddings.size() != p) fail(ErrorKind::DimensionMismatch, "embedding count differs from participant count");
    if (bank_positions.size() != m) fail(ErrorKind::DimensionMismatch, "bank positions differ from bank ids");
    if (p < m) fail(ErrorKind::DimensionMismatch, "fewer participants than bank members");
    if (bank_rows.rows() != m || bank_rows.cols() != p) fail(ErrorKind::DimensionMismatch, "bank rows block has the wrong shape");
    if (bank_cols.rows() != p || bank_cols.cols() != m) fail(ErrorKind::DimensionMismatch, "bank columns block has the wrong shape");
    for (std::size_t j = 0; j < m; ++j) {
        if (bank_positions[j] >= p) fail(ErrorKind::IndexOutOfRange, "bank position out of range");
        if (participant_ids[bank_positions[j]] != bank_ids[j]) fail(ErrorKind::IndexOutOfRange, "bank id does not match its participant slot");
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (std::abs(bank_rows(i, bank_positions[j]) - bank_cols(bank_positions[i], j)) > tolerance) {
                fail(ErrorKind::DimensionMismatch, "bank rows and bank columns disagree on the bank block");
            }
        }
    }
}

Matrix column_weights(const CrossSimilarityMatrix& sim, std::size_t* degenerate_columns) {
    const std::size_t p = sim.values.rows();
    const std::size_t q = sim.values.cols();
    Matrix w(p, q);
    std::vector<double> mass(q, 0.0);
    for (std::size_t l = 0; l < p; ++l) {
        auto row = sim.values.row(l);
        for (std::size_t k = 0; k < q; ++k) mass[k] += std::max(0.0, row[k]);
    }
    std::size_t degenerate = 0;
    for (std::size_t k = 0; k < q; ++k) {
        if (mass[k] < 1e-12) ++degenerate;
    }
    for (std::size_t j = 0; j < p; ++j) {
        auto row = sim.values.row(j);
        auto out = w.row(j);
        for (std::size_t k = 0; k < q; ++k) {
            out[k] = mass[k] < 1e-12 ? 1.0 / static_cast<double>(p)
                                     : std::max(0.0, row[k]) / mass[k];
        }
    }
    if (degenerate > 0) {
        warn("momentum: " + std::to_string(degenerate) +
             " new point(s) have no positive similarity to past participants; using uniform weights");
    }
    if (degenerate_columns) *degenerate_columns = degenerate;
    return w;
}

Matrix estimate_top_right(const Matrix& bank_rows, const CrossSimilarityMatrix& sim) {
    if (bank_rows.cols() != sim.values.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "top-right estimate: participant counts differ");
    }
    const std::size_t m = bank_rows.rows();
    const std::size_t p = bank_rows.cols();
    const std::size_t q = sim.values.cols();
    const Matrix w = column_weights(sim);

    Matrix block(m, q);
    for (std::size_t i = 0; i < m; ++i) {
        auto out = block.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double h = bank_rows(i, j);
            auto wj = w.row(j);
            for (std::size_t k = 0; k < q; ++k) out[k] += wj[k] * h;
        }
    }
    return block;
}

Matrix estimate_bottom_left(const Matrix& bank_cols, const CrossSimilarityMatrix& sim) {
    if (bank_cols.rows() != sim.values.rows()) {
        throw Error(ErrorKind::DimensionMismatch, "bottom-left estimate: participant counts differ");
    }
    const std::size_t p = bank_cols.rows();
    const std::size_t m = bank_cols.cols();
    const std::size_t q = sim.values.cols();
    const Matrix w = column_weights(sim);

    Matrix block(q, m);
    for (std::size_t c = 0; c < q; ++c) {
        auto out = block.row(c);
        for (std::size_t j = 0; j < p; ++j) {
            const double wjc = w(j, c);
            auto h = bank_cols.row(j);
            for (std::size_t k = 0; k < m; ++k) out[k] += wjc * h[k];
        }
    }
    return block;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

MomentumMatrix build_momentum(const HistoryBlocks& history, std::span<const Embedding> new_points) {
    history.validate();
    const std::size_t m = history.bank_size();
    const std::size_t q = new_points.size();
    const std::size_t n = m + q;

    const Matrix top_left = history.bank_block();
    Matrix top_right(m, 0);
    Matrix bottom_left(0, m);
    if (q > 0) {
        const CrossSimilarityMatrix sim = cosine_cross(history.participant_embeddings, new_points);
        top_right = estimate_top_right(history.bank_rows, sim);
        bottom_left = estimate_bottom_left(history.bank_cols, sim);
    }

    std::vector<double> pooled;
    pooled.reserve(m * m + 2 * m * q);
    auto append = [&pooled](const Matrix& b) {
        pooled.insert(pooled.end(), b.values().begin(), b.values().end());
    };
    append(top_left);
    append(top_right);
    append(bottom_left);

    MomentumMatrix out{Matrix(n, n), m, median(std::move(pooled))};
    for (std::size_t i = 0; i < n; ++i) {
        auto row = out.values.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (i < m && k < m) row[k] = top_left(i, k);
            else if (i < m) row[k] = top_right(i, k - m);
            else if (k < m) row[k] = bottom_left(i - m, k);
            else row[k] = out.fill;
        }
    }
    return out;
}

Matrix history_aware_blend(const MomentumMatrix& momentum, const Matrix& fresh,
                           const Matrix& previous, double alpha, double beta) {
    const Matrix& mv = momentum.values;
    if (mv.rows() != fresh.rows() || mv.cols() != fresh.cols() ||
        previous.rows() != fresh.rows() || previous.cols() != fresh.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "history_aware_blend: shapes differ");
    }
    Matrix out(fresh.rows(), fresh.cols());
    auto m = mv.values();
    auto f = fresh.values();
    auto p = previous.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = blend_responsibility(m[i], f[i], p[i], alpha, beta);
    return out;
}

double momentum_alpha(double alpha0, double decay, int iteration) noexcept {
    double a = alpha0;
    for (int i = 0; i < iteration; ++i) a *= decay;
    return a;
}

HistoryBlocks extract_history(const Matrix& final_responsibility,
                              std::span<const std::size_t> bank_positions,
                              std::vector<std::string> participant_ids,
                              std::vector<Embedding> participant_embeddings) {
    const std::size_t p = final_responsibility.rows();
    if (!final_responsibility.square()) {
        throw Error(ErrorKind::DimensionMismatch, "extract_history: responsibility must be square");
    }
    if (participant_ids.size() != p || participant_embeddings.size() != p) {
        throw Error(ErrorKind::DimensionMismatch, "extract_history: participant count differs from matrix size");
    }
    for (std::size_t pos : bank_positions) {
        if (pos >= p) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "extract_history: bank position " + std::to_string(pos) + " out of range");
        }
    }

    const std::size_t m = bank_positions.size();
    HistoryBlocks h;
    h.bank_positions.assign(bank_positions.begin(), bank_positions.end());
    h.bank_rows = Matrix(m, p);
    h.bank_cols = Matrix(p, m);
    for (std::size_t i = 0; i < m; ++i) {
        auto src = final_responsibility.row(bank_positions[i]);
        std::copy(src.begin(), src.end(), h.bank_rows.row(i).begin());
        h.bank_ids.push_back(participant_ids[bank_positions[i]]);
    }
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < m; ++k) h.bank_cols(j, k) = final_responsibility(j, bank_positions[k]);
    }
    h.participant_ids = std::move(participant_ids);
    h.participant_embeddings = std::move(participant_embeddings);
    return h;
}

}  // namespace evobank
