#include "rtvae/model/vae.hpp"

#include "rtvae/divergences/divergences.hpp"
#include "rtvae/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rtvae {

std::string_view to_string(ContinuousHead head) noexcept {
    return head == ContinuousHead::tanh ? "tanh" : "linear";
}

ContinuousHead parse_continuous_head(std::string_view keyword) {
    if (keyword == "tanh") return ContinuousHead::tanh;
    if (keyword == "linear") return ContinuousHead::linear;
    throw ParseError("unknown continuous head '" + std::string(keyword) + "'");
}

void Architecture::validate() const {
    if (layout.empty()) {
        throw DataError("architecture has an empty feature layout");
    }
    std::size_t offset = 0;
    for (const auto& slot : layout) {
        if (slot.offset != offset || slot.width == 0) {
            throw DataError("feature layout does not tile the input at '" + slot.column + "'");
        }
        if (slot.kind == ColumnKind::continuous && slot.width != 1) {
            throw DataError("continuous slot '" + slot.column + "' must have width 1");
        }
        if (slot.kind == ColumnKind::ignore) {
            throw DataError("ignored column '" + slot.column + "' in feature layout");
        }
        offset += slot.width;
    }
    if (latent_dim == 0) {
        throw DataError("latent_dim must be at least 1");
    }
    auto positive = [](std::size_t w) { return w > 0; };
    if (!std::all_of(encoder_hidden.begin(), encoder_hidden.end(), positive) ||
        !std::all_of(decoder_hidden.begin(), decoder_hidden.end(), positive)) {
        throw DataError("hidden layer widths must be at least 1");
    }
    if (!(observation_sigma > 0.0) || !std::isfinite(observation_sigma)) {
        throw DataError("observation sigma must be positive");
    }
}

std::vector<Matrix*> ModelParams::tensors() {
    std::vector<Matrix*> out;
    auto push = [&](DenseLayer& l) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    };
    for (auto& l : encoder) push(l);
    push(mu_head);
    push(logvar_head);
    for (auto& l : decoder) push(l);
    push(output);
    return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
    auto mutable_ptrs = const_cast<ModelParams*>(this)->tensors();
    return {mutable_ptrs.begin(), mutable_ptrs.end()};
}

std::vector<std::string> ModelParams::tensor_names() const {
    std::vector<std::string> out;
    auto push = [&](const std::string& prefix) {
        out.push_back(prefix + ".weight");
        out.push_back(prefix + ".bias");
    };
    for (std::size_t i = 0; i < encoder.size(); ++i) push("encoder." + std::to_string(i));
    push("mu_head");
    push("logvar_head");
    for (std::size_t i = 0; i < decoder.size(); ++i) push("decoder." + std::to_string(i));
    push("output");
    return out;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const Matrix* t : tensors()) {
        n += t->size();
    }
    return n;
}

ModelParams zero_params(const Architecture& arch) {
    arch.validate();
    auto layer = [](std::size_t fan_in, std::size_t fan_out) {
        return DenseLayer{Matrix(fan_in, fan_out), Matrix(1, fan_out)};
    };
    ModelParams p;
    std::size_t width = arch.input_width();
    for (std::size_t h : arch.encoder_hidden) {
        p.encoder.push_back(layer(width, h));
        width = h;
    }
    p.mu_head = layer(width, arch.latent_dim);
    p.logvar_head = layer(width, arch.latent_dim);
    width = arch.latent_dim;
    for (std::size_t h : arch.decoder_hidden) {
        p.decoder.push_back(layer(width, h));
        width = h;
    }
    p.output = layer(width, arch.input_width());
    return p;
}

ModelParams init_params(const Architecture& arch, Rng& rng) {
    ModelParams p = zero_params(arch);
    auto tensors = p.tensors();
    // tensors() alternates weight, bias; biases stay zero.
    for (std::size_t i = 0; i < tensors.size(); i += 2) {
        Matrix& w = *tensors[i];
        const double s = std::sqrt(1.0 / static_cast<double>(w.rows()));
        for (double& v : w.values()) {
            v = (2.0 * rng.uniform() - 1.0) * s;
        }
    }
    return p;
}

BoundParams bind_params(Tape& tape, const ModelParams& params, bool trainable) {
    auto leaf = [&](const Matrix& m) { return trainable ? tape.parameter(m) : tape.constant(m); };
    auto bind = [&](const DenseLayer& l) {
        const NodeId w = leaf(l.weight);
        const NodeId b = leaf(l.bias);
        return BoundParams::Layer{w, b};
    };
    BoundParams out;
    for (const auto& l : params.encoder) out.encoder.push_back(bind(l));
    out.mu_head = bind(params.mu_head);
    out.logvar_head = bind(params.logvar_head);
    for (const auto& l : params.decoder) out.decoder.push_back(bind(l));
    out.output = bind(params.output);
    return out;
}

namespace {

NodeId dense(Tape& tape, NodeId x, const BoundParams::Layer& layer) {
    return tape.add_row_broadcast(tape.matmul(x, layer.weight), layer.bias);
}

} // namespace

Posterior encode_forward(Tape& tape, const Architecture& arch, const BoundParams& params,
                         NodeId batch) {
    if (tape.value(batch).cols() != arch.input_width()) {
        throw ShapeError("encoder input has " + std::to_string(tape.value(batch).cols()) +
                         " columns, expected " + std::to_string(arch.input_width()));
    }
    NodeId h = batch;
    for (const auto& layer : params.encoder) {
        h = tape.tanh(dense(tape, h, layer));
    }
    const NodeId mu = dense(tape, h, params.mu_head);
    const NodeId logvar = tape.clamp(dense(tape, h, params.logvar_head), -kLogvarLimit,
                                     kLogvarLimit);
    return {mu, logvar};
}

DecodedHeads decode_forward(Tape& tape, const Architecture& arch, const BoundParams& params,
                            NodeId z) {
    if (tape.value(z).cols() != arch.latent_dim) {
        throw ShapeError("decoder input has " + std::to_string(tape.value(z).cols()) +
                         " columns, expected latent_dim " + std::to_string(arch.latent_dim));
    }
    NodeId h = z;
    for (const auto& layer : params.decoder) {
        h = tape.tanh(dense(tape, h, layer));
    }
    const NodeId out = dense(tape, h, params.output);
    DecodedHeads heads;
    for (const auto& slot : arch.layout) {
        const NodeId raw = tape.column_slice(out, slot.offset, slot.width);
        if (slot.kind == ColumnKind::categorical) {
            heads.heads.push_back(tape.softmax_rows(raw));
        } else if (arch.continuous_head == ContinuousHead::tanh) {
            heads.heads.push_back(tape.tanh(raw));
        } else {
            heads.heads.push_back(raw);
        }
    }
    return heads;
}

std::size_t hot_index(std::span<const double> block) {
    return static_cast<std::size_t>(std::max_element(block.begin(), block.end()) - block.begin());
}

std::vector<double> score_rows(const Architecture& arch, const ModelParams& params,
                               const Matrix& rows) {
    if (rows.cols() != arch.input_width()) {
        throw ShapeError("scoring input has " + std::to_string(rows.cols()) +
                         " columns, expected " + std::to_string(arch.input_width()));
    }
    constexpr std::size_t kChunk = 4096;
    std::vector<double> scores;
    scores.reserve(rows.rows());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < rows.rows(); start += kChunk) {
        const std::size_t end = std::min(rows.rows(), start + kChunk);
        idx.resize(end - start);
        for (std::size_t i = start; i < end; ++i) {
            idx[i - start] = i;
        }
        const Matrix chunk = rows.gather_rows(idx);

        Tape tape;
        const BoundParams bound = bind_params(tape, params, false);
        const NodeId x = tape.constant(chunk);
        const Posterior post = encode_forward(tape, arch, bound, x);
        const DecodedHeads heads = decode_forward(tape, arch, bound, post.mu);

        for (std::size_t r = 0; r < chunk.rows(); ++r) {
            double score = 0.0;
            for (std::size_t s = 0; s < arch.layout.size(); ++s) {
                const FeatureSlot& slot = arch.layout[s];
                const Matrix& head = tape.value(heads.heads[s]);
                const auto observed = chunk.row(r).subspan(slot.offset, slot.width);
                if (slot.kind == ColumnKind::categorical) {
                    score += categorical_ce(head.row(r), hot_index(observed));
                } else {
                    score += gaussian_nll(head(r, 0), observed[0], arch.observation_sigma);
                }
            }
            scores.push_back(score);
        }
    }
    return scores;
}

double nll_score(const Architecture& arch, const ModelParams& params,
                 std::span<const double> row) {
    const Matrix m(1, row.size(), std::vector<double>(row.begin(), row.end()));
    return score_rows(arch, params, m).front();
}

} // namespace rtvae
