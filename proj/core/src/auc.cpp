#include "rtvae/eval/auc.hpp"

#include "rtvae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rtvae {

bool has_both_classes(std::span<const Label> labels) {
    bool normal = false;
    bool anomaly = false;
    for (Label l : labels) {
        (l == Label::normal ? normal : anomaly) = true;
    }
    return normal && anomaly;
}

double auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) {
        throw DataError("auc: " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(labels.size()) + " labels");
    }
    if (!std::all_of(scores.begin(), scores.end(), [](double s) { return std::isfinite(s); })) {
        throw DataError("auc: non-finite score");
    }
    if (!has_both_classes(labels)) {
        throw UndefinedAucError("auc is undefined without both normal and anomaly labels");
    }

    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of 1-based midranks of the anomalies.
    double anomaly_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == Label::anomaly) {
                anomaly_rank_sum += midrank;
            }
        }
        i = j;
    }

    const auto n_anomaly = static_cast<double>(
        std::count(labels.begin(), labels.end(), Label::anomaly));
    const double n_normal = static_cast<double>(n) - n_anomaly;
    const double u = anomaly_rank_sum - n_anomaly * (n_anomaly + 1.0) / 2.0;
    return u / (n_anomaly * n_normal);
}

double auc(const ScoredSet& set) { return auc(set.scores, set.labels); }

} // namespace rtvae
