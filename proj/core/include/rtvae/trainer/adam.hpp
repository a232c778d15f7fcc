#pragma once

#include "rtvae/model/vae.hpp"
#include "rtvae/numerics/matrix.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rtvae {

struct AdamSettings {
    double learning_rate = 1e-3;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

/// First and second moments per tensor, plus the step counter.
struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::uint64_t t = 0;

    static AdamState zeros_like(std::span<const Matrix* const> params);
    static AdamState zeros_like(const ModelParams& params);
};

/// One bias-corrected Adam update:
///   t += 1; m = b1 m + (1 - b1) g; v = b2 v + (1 - b2) g^2
///   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state,
               const AdamSettings& settings);
void adam_step(ModelParams& params, std::span<const Matrix> grads, AdamState& state,
               const AdamSettings& settings);

} // namespace rtvae
