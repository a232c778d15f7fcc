#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/data/raw_table.hpp"
#include "rtvae/numerics/rng.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace rtvae {

/// Row indices of a train/hold-out partition.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> holdout;
};

/// Uniform shuffle of [0, n); the last round(fraction * n) positions form the
/// hold-out. Throws DataError when the fraction is outside (0, 1) or either
/// side would be empty.
SplitIndices split_indices(std::size_t n, double holdout_fraction, Rng& rng);

std::pair<EncodedDataset, EncodedDataset> split(const EncodedDataset& ds,
                                                double holdout_fraction, Rng& rng);

/// Where each row of a contaminated set comes from.
struct ContaminationPlan {
    struct Row {
        Label source;
        std::size_t index;
    };
    std::vector<Row> rows;

    std::size_t anomaly_count() const;
};

/// `total` rows: round(rate * total) drawn without replacement from the
/// anomaly pool, the rest from the normal pool, in shuffled order.
ContaminationPlan plan_contamination(std::size_t normal_pool, std::size_t anomaly_pool,
                                     double rate, std::size_t total, Rng& rng);

/// Applies a fresh plan. The result carries injection labels (anomaly for
/// rows taken from `anomaly_pool`), replacing any labels of the inputs.
EncodedDataset contaminate(const EncodedDataset& normals, const EncodedDataset& anomaly_pool,
                           double rate, std::size_t total, Rng& rng);
RawTable contaminate(const RawTable& normals, const RawTable& anomaly_pool, double rate,
                     std::size_t total, Rng& rng);

} // namespace rtvae
