#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/data/raw_table.hpp"
#include "rtvae/data/schema.hpp"
#include "rtvae/numerics/rng.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rtvae {

/// Gaussian column with class-conditional mean and spread.
struct SyntheticContinuous {
    std::string name;
    double normal_mean = 0.0;
    double normal_std = 1.0;
    double anomaly_mean = 4.0;
    double anomaly_std = 1.0;
};

/// Categorical column with class-conditional category probabilities.
struct SyntheticCategorical {
    std::string name;
    std::vector<std::string> categories;
    std::vector<double> normal_probs;
    std::vector<double> anomaly_probs;
};

/// Two-class generator standing in for labelled network traffic.
struct SyntheticSpec {
    std::vector<SyntheticContinuous> continuous;
    std::vector<SyntheticCategorical> categorical;
    std::size_t normals = 5000;
    std::size_t anomalies = 1000;

    /// Two continuous columns, N(0,1) for normals and N(4,1) for anomalies,
    /// and one two-category column drawn 90/10 for normals and 10/90 for
    /// anomalies; 5000 normals and 1000 anomalies.
    static SyntheticSpec default_spec();

    /// Continuous columns first, then categoricals, plus a "label" column.
    TableSchema schema() const;
    /// Throws DataError for zero columns or malformed category tables.
    void validate() const;
};

struct SyntheticPools {
    TableSchema schema;
    RawTable normals;
    RawTable anomalies;

    /// Both pools encoded with an encoder fitted on the normals.
    std::pair<EncodedDataset, EncodedDataset> encoded() const;
};

/// Draws `spec.normals` normal and `spec.anomalies` anomalous rows, labelled.
SyntheticPools generate_synthetic(const SyntheticSpec& spec, Rng& rng);

} // namespace rtvae
