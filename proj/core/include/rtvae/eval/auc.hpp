#pragma once

#include "rtvae/data/schema.hpp"

#include <span>
#include <vector>

namespace rtvae {

/// Scores aligned with ground-truth labels; higher score = more anomalous.
struct ScoredSet {
    std::vector<double> scores;
    std::vector<Label> labels;
};

/// Area under the ROC curve as the Mann-Whitney statistic,
/// P(anomaly > normal) + P(anomaly == normal) / 2, from one sort with midrank
/// tie handling. O(n log n).
///
/// Throws UndefinedAucError unless both classes are present, and DataError
/// on length mismatch or non-finite scores.
double auc(std::span<const double> scores, std::span<const Label> labels);
double auc(const ScoredSet& set);

/// True when both labels occur.
bool has_both_classes(std::span<const Label> labels);

} // namespace rtvae
