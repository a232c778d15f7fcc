#include "rtvae/trainer/adam.hpp"

#include "rtvae/errors.hpp"

#include <cmath>

namespace rtvae {

void AdamSettings::validate() const {
    if (!(learning_rate > 0.0)) {
        throw DataError("learning_rate must be positive");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw DataError("Adam moment coefficients must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) {
        throw DataError("Adam epsilon must be positive");
    }
}

AdamState AdamState::zeros_like(std::span<const Matrix* const> params) {
    AdamState s;
    for (const Matrix* p : params) {
        s.m.emplace_back(p->rows(), p->cols());
        s.v.emplace_back(p->rows(), p->cols());
    }
    return s;
}

AdamState AdamState::zeros_like(const ModelParams& params) {
    const auto tensors = params.tensors();
    return zeros_like(std::span<const Matrix* const>(tensors));
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state,
               const AdamSettings& s) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ShapeError("adam_step: " + std::to_string(params.size()) + " params, " +
                         std::to_string(grads.size()) + " grads, " +
                         std::to_string(state.m.size()) + " moment slots");
    }
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double correction1 = 1.0 - std::pow(s.beta1, t);
    const double correction2 = 1.0 - std::pow(s.beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        const Matrix& g = grads[k];
        if (!p.same_shape(g) || !p.same_shape(state.m[k])) {
            throw ShapeError("adam_step: tensor " + std::to_string(k) + " shape " +
                             p.shape_string() + " vs gradient " + g.shape_string());
        }
        auto pv = p.values();
        auto gv = g.values();
        auto mv = state.m[k].values();
        auto vv = state.v[k].values();
        for (std::size_t i = 0; i < pv.size(); ++i) {
            mv[i] = s.beta1 * mv[i] + (1.0 - s.beta1) * gv[i];
            vv[i] = s.beta2 * vv[i] + (1.0 - s.beta2) * gv[i] * gv[i];
            const double m_hat = mv[i] / correction1;
            const double v_hat = vv[i] / correction2;
            pv[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
        }
    }
}

void adam_step(ModelParams& params, std::span<const Matrix> grads, AdamState& state,
               const AdamSettings& settings) {
    const auto tensors = params.tensors();
    adam_step(std::span<Matrix* const>(tensors), grads, state, settings);
}

} // namespace rtvae
