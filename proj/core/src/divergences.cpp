#include "rtvae/divergences/divergences.hpp"

#include "rtvae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rtvae {

namespace {

double floored(double p) { return std::max(p, kProbabilityFloor); }

void require_positive_beta(double beta) {
    if (!(beta > 0.0)) {
        throw DataError("beta-cross-entropy requires beta > 0");
    }
}

void require_target(std::span<const double> probs, std::size_t target) {
    if (target >= probs.size()) {
        throw DataError("category index " + std::to_string(target) + " out of range for " +
                        std::to_string(probs.size()) + " probabilities");
    }
}

NodeId ones_like(Tape& tape, NodeId n) {
    const Matrix& v = tape.value(n);
    return tape.constant(Matrix(v.rows(), v.cols(), 1.0));
}

} // namespace

Beta::Beta(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        throw DataError("beta must lie in [0, 1], got " + std::to_string(value));
    }
}

double categorical_ce(std::span<const double> probs, std::size_t target) {
    require_target(probs, target);
    return -std::log(floored(probs[target]));
}

double gaussian_nll(double xhat, double x, double sigma) {
    const double r = xhat - x;
    return 0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) + r * r / (2.0 * sigma * sigma);
}

double categorical_beta_ce(std::span<const double> probs, std::size_t target, double beta) {
    require_positive_beta(beta);
    require_target(probs, target);
    double mass = 0.0;
    for (double p : probs) {
        mass += std::pow(floored(p), beta + 1.0);
    }
    return -((beta + 1.0) / beta) * (std::pow(floored(probs[target]), beta) - 1.0) + mass;
}

double gaussian_beta_ce(double xhat, double x, double sigma, double beta) {
    require_positive_beta(beta);
    const double r = xhat - x;
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -beta / 2.0);
    return ((beta + 1.0) / beta) * (1.0 - norm * std::exp(-beta * r * r / (2.0 * sigma * sigma)));
}

double kl_gaussian_standard(const Matrix& mu, const Matrix& logvar) {
    if (!mu.same_shape(logvar)) {
        throw ShapeError("kl_gaussian_standard: mu " + mu.shape_string() + ", logvar " +
                         logvar.shape_string());
    }
    if (mu.rows() == 0) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < mu.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < mu.cols(); ++j) {
            const double m = mu(i, j);
            const double lv = logvar(i, j);
            row += m * m + std::exp(lv) - lv - 1.0;
        }
        total += 0.5 * row;
    }
    return total / static_cast<double>(mu.rows());
}

NodeId categorical_ce_rows(Tape& tape, NodeId probs, NodeId one_hot) {
    const NodeId p_target = tape.sum_rows(tape.multiply(probs, one_hot));
    return tape.negate(tape.log(p_target));
}

NodeId categorical_beta_ce_rows(Tape& tape, NodeId probs, NodeId one_hot, double beta) {
    require_positive_beta(beta);
    const NodeId p_target = tape.sum_rows(tape.multiply(probs, one_hot));
    const NodeId fit = tape.subtract(tape.power(p_target, beta), ones_like(tape, p_target));
    const NodeId mass = tape.sum_rows(tape.power(probs, beta + 1.0));
    return tape.add(tape.scale(fit, -(beta + 1.0) / beta), mass);
}

NodeId gaussian_nll_rows(Tape& tape, NodeId xhat, NodeId x, double sigma) {
    const NodeId sq = tape.scale(tape.square(tape.subtract(xhat, x)), 1.0 / (2.0 * sigma * sigma));
    const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
    const Matrix& shape = tape.value(sq);
    const NodeId offset = tape.constant(Matrix(shape.rows(), shape.cols(), log_norm));
    return tape.sum_rows(tape.add(offset, sq));
}

NodeId gaussian_beta_ce_rows(Tape& tape, NodeId xhat, NodeId x, double sigma, double beta) {
    require_positive_beta(beta);
    const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -beta / 2.0);
    const NodeId sq = tape.square(tape.subtract(xhat, x));
    const NodeId kernel =
        tape.scale(tape.exp(tape.scale(sq, -beta / (2.0 * sigma * sigma))), norm);
    const NodeId gap = tape.subtract(ones_like(tape, kernel), kernel);
    return tape.sum_rows(tape.scale(gap, (beta + 1.0) / beta));
}

NodeId kl_gaussian_rows(Tape& tape, NodeId mu, NodeId logvar) {
    const NodeId inner = tape.subtract(tape.add(tape.square(mu), tape.exp(logvar)),
                                       tape.add(logvar, ones_like(tape, logvar)));
    return tape.scale(tape.sum_rows(inner), 0.5);
}

} // namespace rtvae
