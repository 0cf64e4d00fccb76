#pragma once

#include <cstddef>
#include <vector>

#include "evobank/geometry.hpp"
#include "evobank/matrix.hpp"

namespace evobank {

/// Responsibility and availability messages of one affinity-propagation run.
struct MessageState {
    Matrix responsibility;
    Matrix availability;
    int iteration = 0;
    bool converged = false;

    static MessageState zeros(std::size_t n) { return {Matrix(n, n), Matrix(n, n), 0, false}; }
    [[nodiscard]] std::size_t size() const noexcept { return responsibility.rows(); }
};

struct ApParams {
    double damping = 0.5;  // weight on the freshly computed message
    int max_iters = 200;
    int stable_iters = 15;
};

/// History-aware responsibility blending. `values` must outlive the run.
/// Iteration i (1-based) uses alpha_i = decay^i * alpha0.
struct Momentum {
    const Matrix* values = nullptr;
    double alpha0 = 0.0;
    double decay = 1.0;
};

struct Exemplars {
    std::vector<std::size_t> centers;     // ascending point indices
    std::vector<std::size_t> assignment;  // argmax column per row
};

/// R[i,k] = S[i,k] - max_{k' != k}(A[i,k'] + S[i,k']). The empty max (n = 1) is 0.
Matrix update_responsibility(const SimilarityMatrix& similarity, const MessageState& state);

/// Availability rule from a responsibility matrix. Column sums run over rows in
/// ascending order; the off-diagonal term is that sum minus the row's own share.
Matrix update_availability(const Matrix& responsibility);

/// beta * fresh + (1 - beta) * old.
Matrix damp(const Matrix& fresh, const Matrix& old, double beta);

inline double blend_responsibility(double momentum, double fresh, double previous, double alpha,
                                   double beta) noexcept {
    return alpha * momentum + (1.0 - alpha) * (beta * fresh + (1.0 - beta) * previous);
}

/// Row argmax of A + R (ties to the smallest index); i is an exemplar iff it picks itself.
Exemplars extract_exemplars(const MessageState& state);

/// Damped message passing from all-zero messages. Each iteration updates R (blended
/// with momentum when given) and then A, and stops once the exemplar set has been
/// identical and non-empty for `stable_iters` consecutive iterations.
MessageState run_ap(const SimilarityMatrix& similarity, const ApParams& params,
                    const Momentum* momentum = nullptr);

}  // namespace evobank
