#pragma once

#include "rtvae/divergences/divergences.hpp"
#include "rtvae/model/vae.hpp"
#include "rtvae/numerics/rng.hpp"
#include "rtvae/numerics/tape.hpp"

namespace rtvae {

/// Batch means of the loss terms; total = (rec_categorical + rec_continuous) + kl.
struct LossBreakdown {
    double rec_categorical = 0.0;
    double rec_continuous = 0.0;
    double kl_regularizer = 0.0;
    double total = 0.0;
};

/// Node handles of a built objective. `total` is the last node on the tape.
struct LossGraph {
    BoundParams params;
    NodeId rec_categorical;
    NodeId rec_continuous;
    NodeId kl_regularizer;
    NodeId total;

    LossBreakdown breakdown(const Tape& tape) const;
};

/// Builds the training objective for `batch` on an empty tape.
///
/// Model tensors become the tape's parameters in ModelParams::tensors()
/// order, so `tape.backward()` returns gradients aligned with tensors().
/// One reparameterized latent draw per row uses `noise` (B x latent_dim).
/// Every slot contributes its reconstruction term, chosen by kind and by
/// whether beta is zero (standard cross-entropy / Gaussian NLL) or positive
/// (beta-cross-entropy); terms are summed over slots and averaged over rows.
LossGraph build_total_loss(Tape& tape, const Architecture& arch, const ModelParams& params,
                           const Matrix& batch, Beta beta, const Matrix& noise);

/// build_total_loss with the noise drawn from `rng`.
LossBreakdown total_loss(const Architecture& arch, const ModelParams& params,
                         const Matrix& batch, Beta beta, Rng& rng, Tape& tape);

} // namespace rtvae
