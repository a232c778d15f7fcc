#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/numerics/matrix.hpp"
#include "rtvae/numerics/rng.hpp"
#include "rtvae/numerics/tape.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rtvae {

/// Output activation of continuous feature heads.
enum class ContinuousHead : std::uint8_t { tanh, linear };

std::string_view to_string(ContinuousHead head) noexcept;
ContinuousHead parse_continuous_head(std::string_view keyword);

inline constexpr double kLogvarLimit = 10.0;

struct Architecture {
    FeatureLayout layout;
    std::vector<std::size_t> encoder_hidden{64, 32};
    std::size_t latent_dim = 8;
    std::vector<std::size_t> decoder_hidden{32, 64};
    ContinuousHead continuous_head = ContinuousHead::tanh;
    /// Fixed standard deviation of the continuous likelihood.
    double observation_sigma = 1.0;

    std::size_t input_width() const { return layout_width(layout); }
    /// Throws DataError on zero widths, an empty or non-tiling layout, or a
    /// non-positive sigma.
    void validate() const;

    bool operator==(const Architecture&) const = default;
};

/// y = x W + b, with W stored fan_in x fan_out.
struct DenseLayer {
    Matrix weight;
    Matrix bias;
    bool operator==(const DenseLayer&) const = default;
};

/// Encoder (phi) and decoder (theta) weights.
struct ModelParams {
    std::vector<DenseLayer> encoder;
    DenseLayer mu_head;
    DenseLayer logvar_head;
    std::vector<DenseLayer> decoder;
    DenseLayer output;

    /// Every weight and bias, in a fixed order (encoder, mu, logvar, decoder,
    /// output; weight before bias). Optimizers and serialization rely on it.
    std::vector<Matrix*> tensors();
    std::vector<const Matrix*> tensors() const;
    /// Stable names aligned with tensors(), e.g. "encoder.0.weight".
    std::vector<std::string> tensor_names() const;
    std::size_t parameter_count() const;

    bool operator==(const ModelParams&) const = default;
};

/// All-zero parameters with the shapes `arch` implies.
ModelParams zero_params(const Architecture& arch);

/// Weights ~ U(-s, s) with s = sqrt(1 / fan_in); biases zero.
ModelParams init_params(const Architecture& arch, Rng& rng);

/// Tape handles for one copy of ModelParams, layer for layer.
struct BoundParams {
    struct Layer {
        NodeId weight;
        NodeId bias;
    };
    std::vector<Layer> encoder;
    Layer mu_head;
    Layer logvar_head;
    std::vector<Layer> decoder;
    Layer output;
};

/// Adds every tensor as a parameter (trainable) or constant leaf, in
/// tensors() order.
BoundParams bind_params(Tape& tape, const ModelParams& params, bool trainable);

struct Posterior {
    NodeId mu;
    NodeId logvar;
};

/// tanh hidden layers, linear mu head, logvar head clamped to
/// [-kLogvarLimit, kLogvarLimit].
Posterior encode_forward(Tape& tape, const Architecture& arch, const BoundParams& params,
                         NodeId batch);

/// One head per layout slot: B x width softmax probabilities for
/// categoricals, B x 1 means for continuous columns.
struct DecodedHeads {
    std::vector<NodeId> heads;
};

DecodedHeads decode_forward(Tape& tape, const Architecture& arch, const BoundParams& params,
                            NodeId z);

/// Per-row anomaly scores: negative log-likelihood of each row under the
/// decoder evaluated at the posterior mean. Categorical terms are
/// -log p(observed), continuous terms the Gaussian NLL with the
/// architecture's sigma.
std::vector<double> score_rows(const Architecture& arch, const ModelParams& params,
                               const Matrix& rows);

/// Score of a single encoded row.
double nll_score(const Architecture& arch, const ModelParams& params,
                 std::span<const double> row);

/// Index of the hot entry of a one-hot block.
std::size_t hot_index(std::span<const double> block);

} // namespace rtvae
