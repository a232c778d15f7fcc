#include "rtvae/divergences/objective.hpp"

#include "rtvae/errors.hpp"

#include <optional>

namespace rtvae {

LossBreakdown LossGraph::breakdown(const Tape& tape) const {
    return {tape.value(rec_categorical).item(), tape.value(rec_continuous).item(),
            tape.value(kl_regularizer).item(), tape.value(total).item()};
}

LossGraph build_total_loss(Tape& tape, const Architecture& arch, const ModelParams& params,
                           const Matrix& batch, Beta beta, const Matrix& noise) {
    if (batch.rows() == 0) {
        throw DataError("total_loss on an empty batch");
    }
    if (tape.size() != 0) {
        throw ShapeError("build_total_loss expects an empty tape");
    }
    LossGraph g;
    g.params = bind_params(tape, params, true);
    const NodeId x = tape.constant(batch);
    const Posterior post = encode_forward(tape, arch, g.params, x);
    const NodeId eps = tape.constant(noise);
    const NodeId z = reparameterize(tape, post.mu, post.logvar, eps);
    const DecodedHeads heads = decode_forward(tape, arch, g.params, z);

    const double b = beta.value();
    const double sigma = arch.observation_sigma;
    std::optional<NodeId> cat;
    std::optional<NodeId> cont;
    auto accumulate = [&](std::optional<NodeId>& acc, NodeId term) {
        acc = acc ? tape.add(*acc, term) : term;
    };
    for (std::size_t s = 0; s < arch.layout.size(); ++s) {
        const FeatureSlot& slot = arch.layout[s];
        const NodeId target = tape.column_slice(x, slot.offset, slot.width);
        const NodeId head = heads.heads[s];
        if (slot.kind == ColumnKind::categorical) {
            accumulate(cat, beta.is_standard() ? categorical_ce_rows(tape, head, target)
                                               : categorical_beta_ce_rows(tape, head, target, b));
        } else {
            accumulate(cont, beta.is_standard()
                                 ? gaussian_nll_rows(tape, head, target, sigma)
                                 : gaussian_beta_ce_rows(tape, head, target, sigma, b));
        }
    }

    const auto mean_or_zero = [&](const std::optional<NodeId>& rows) {
        return rows ? tape.mean_all(*rows) : tape.constant(Matrix::scalar(0.0));
    };
    g.rec_categorical = mean_or_zero(cat);
    g.rec_continuous = mean_or_zero(cont);
    g.kl_regularizer = tape.mean_all(kl_gaussian_rows(tape, post.mu, post.logvar));
    g.total = tape.add(tape.add(g.rec_categorical, g.rec_continuous), g.kl_regularizer);
    return g;
}

LossBreakdown total_loss(const Architecture& arch, const ModelParams& params,
                         const Matrix& batch, Beta beta, Rng& rng, Tape& tape) {
    const Matrix noise = rng.normal_matrix(batch.rows(), arch.latent_dim);
    return build_total_loss(tape, arch, params, batch, beta, noise).breakdown(tape);
}

} // namespace rtvae
