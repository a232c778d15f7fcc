#pragma once

#include "rtvae/numerics/matrix.hpp"
#include "rtvae/numerics/tape.hpp"

#include <cstddef>
#include <span>

namespace rtvae {

/// Robust divergence coefficient. Zero selects the standard (KL) losses.
class Beta {
public:
    /// Throws DataError unless 0 <= value <= 1 and finite.
    explicit Beta(double value);

    double value() const noexcept { return value_; }
    bool is_standard() const noexcept { return value_ == 0.0; }

    friend bool operator==(Beta, Beta) = default;
    friend auto operator<=>(Beta a, Beta b) { return a.value_ <=> b.value_; }

private:
    double value_;
};

// Scalar forms. Probabilities are floored at kProbabilityFloor before any log
// or power, exactly as the tape does.

/// -log p[target].
double categorical_ce(std::span<const double> probs, std::size_t target);

/// 0.5 log(2 pi sigma^2) + (xhat - x)^2 / (2 sigma^2).
double gaussian_nll(double xhat, double x, double sigma);

/// Categorical beta-cross-entropy of one observation:
///   -((b + 1) / b) (p[target]^b - 1) + sum_k p[k]^(b + 1)
/// Tends to 1 + categorical_ce as b -> 0. Requires b > 0.
double categorical_beta_ce(std::span<const double> probs, std::size_t target, double beta);

/// Gaussian beta-cross-entropy of one scalar observation, shifted to be
/// nonnegative:
///   ((b + 1) / b) (1 - (2 pi sigma^2)^(-b/2) exp(-b (xhat - x)^2 / (2 sigma^2)))
/// Bounded above by (b + 1) / b. Requires b > 0.
double gaussian_beta_ce(double xhat, double x, double sigma, double beta);

/// KL(N(mu, exp(logvar)) || N(0, I)) summed over latent dims, averaged over rows.
double kl_gaussian_standard(const Matrix& mu, const Matrix& logvar);

// Tape forms. Inputs are B x W nodes; each returns a B x 1 node of per-row
// losses summed over the columns of the block.

NodeId categorical_ce_rows(Tape& tape, NodeId probs, NodeId one_hot);
NodeId categorical_beta_ce_rows(Tape& tape, NodeId probs, NodeId one_hot, double beta);
NodeId gaussian_nll_rows(Tape& tape, NodeId xhat, NodeId x, double sigma);
NodeId gaussian_beta_ce_rows(Tape& tape, NodeId xhat, NodeId x, double sigma, double beta);
NodeId kl_gaussian_rows(Tape& tape, NodeId mu, NodeId logvar);

} // namespace rtvae
