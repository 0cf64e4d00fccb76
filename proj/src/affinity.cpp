#include "evobank/affinity.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace evobank {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct RowMax {
    double first = kNegInf;
    double second = kNegInf;
    std::size_t index = 0;
};

RowMax top_two(std::span<const double> a, std::span<const double> s) noexcept {
    RowMax m;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double v = a[k] + s[k];
        if (v > m.first) {
            m.second = m.first;
            m.first = v;
            m.index = k;
        } else if (v > m.second) {
            m.second = v;
        }
    }
    return m;
}

// value of the max over k' != k given the row's top two
inline double excluded_max(const RowMax& m, std::size_t k, std::size_t n) noexcept {
    if (n == 1) return 0.0;
    return k == m.index ? m.second : m.first;
}

void require_square(const Matrix& m, std::size_t n, const char* what) {
    if (m.rows() != n || m.cols() != n) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " has the wrong shape");
    }
}

}  // namespace

Matrix update_responsibility(const SimilarityMatrix& similarity, const MessageState& state) {
    const std::size_t n = similarity.size();
    require_square(similarity.values, n, "similarity matrix");
    require_square(state.availability, n, "availability matrix");

    Matrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto s = similarity.values.row(i);
        const RowMax m = top_two(state.availability.row(i), s);
        auto out = r.row(i);
        for (std::size_t k = 0; k < n; ++k) out[k] = s[k] - excluded_max(m, k, n);
    }
    return r;
}

Matrix update_availability(const Matrix& responsibility) {
    const std::size_t n = responsibility.rows();
    require_square(responsibility, n, "responsibility matrix");

    std::vector<double> positive(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = responsibility.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) positive[k] += std::max(0.0, row[k]);
        }
    }

    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = responsibility.row(i);
        auto out = a.row(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) {
                out[k] = positive[k];
            } else {
                const double others = positive[k] - std::max(0.0, r[k]);
                out[k] = std::min(0.0, responsibility(k, k) + others);
            }
        }
    }
    return a;
}

Matrix damp(const Matrix& fresh, const Matrix& old, double beta) {
    if (fresh.rows() != old.rows() || fresh.cols() != old.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "damp: shapes differ");
    }
    Matrix out(fresh.rows(), fresh.cols());
    auto f = fresh.values();
    auto o = old.values();
    auto d = out.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = beta * f[i] + (1.0 - beta) * o[i];
    return out;
}

Exemplars extract_exemplars(const MessageState& state) {
    const std::size_t n = state.size();
    Exemplars ex;
    ex.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto a = state.availability.row(i);
        auto r = state.responsibility.row(i);
        std::size_t best = 0;
        double best_value = kNegInf;
        for (std::size_t k = 0; k < n; ++k) {
            const double z = a[k] + r[k];
            if (z > best_value) {
                best_value = z;
                best = k;
            }
        }
        ex.assignment[i] = best;
        if (best == i) ex.centers.push_back(i);
    }
    return ex;
}

MessageState run_ap(const SimilarityMatrix& similarity, const ApParams& params,
                    const Momentum* momentum) {
    const std::size_t n = similarity.size();
    require_square(similarity.values, n, "similarity matrix");
    if (momentum != nullptr) {
        if (momentum->values == nullptr) throw Error(ErrorKind::InvalidConfig, "momentum without values");
        require_square(*momentum->values, n, "momentum matrix");
    }

    MessageState state = MessageState::zeros(n);
    if (params.max_iters <= 0 || n == 0) return state;

    const double beta = params.damping;
    Matrix& R = state.responsibility;
    Matrix& A = state.availability;

    std::vector<double> positive(n);
    std::vector<double> diag(n);
    std::vector<std::size_t> centers;
    std::vector<std::size_t> previous;
    int stable = 0;
    double alpha = momentum ? momentum->alpha0 : 0.0;

    for (int it = 1; it <= params.max_iters; ++it) {
        if (momentum) alpha *= momentum->decay;

        // responsibilities, accumulating column sums of positive parts row by row
        std::fill(positive.begin(), positive.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto s = similarity.values.row(i);
            auto r = R.row(i);
            const RowMax m = top_two(A.row(i), s);
            if (momentum) {
                auto mrow = momentum->values->row(i);
                for (std::size_t k = 0; k < n; ++k) {
                    const double fresh = s[k] - excluded_max(m, k, n);
                    r[k] = blend_responsibility(mrow[k], fresh, r[k], alpha, beta);
                }
            } else {
                for (std::size_t k = 0; k < n; ++k) {
                    const double fresh = s[k] - excluded_max(m, k, n);
                    r[k] = beta * fresh + (1.0 - beta) * r[k];
                }
            }
            for (std::size_t k = 0; k < n; ++k) {
                if (k != i) positive[k] += std::max(0.0, r[k]);
            }
            diag[i] = r[i];
        }

        // availabilities, fused with the exemplar argmax
        centers.clear();
        for (std::size_t i = 0; i < n; ++i) {
            auto r = R.row(i);
            auto a = A.row(i);
            std::size_t best = 0;
            double best_value = kNegInf;
            for (std::size_t k = 0; k < n; ++k) {
                double fresh;
                if (k == i) {
                    fresh = positive[k];
                } else {
                    const double others = positive[k] - std::max(0.0, r[k]);
                    fresh = std::min(0.0, diag[k] + others);
                }
                a[k] = beta * fresh + (1.0 - beta) * a[k];
                const double z = a[k] + r[k];
                if (z > best_value) {
                    best_value = z;
                    best = k;
                }
            }
            if (best == i) centers.push_back(i);
        }

        state.iteration = it;
        stable = (it > 1 && centers == previous) ? stable + 1 : 1;
        std::swap(previous, centers);
        if (!previous.empty() && stable >= params.stable_iters) {
            state.converged = true;
            break;
        }
    }

    if (!state.converged) {
        warn("affinity propagation did not converge within " + std::to_string(params.max_iters) +
             " iterations (n=" + std::to_string(n) + ")");
    }
    return state;
}

}  // namespace evobank
