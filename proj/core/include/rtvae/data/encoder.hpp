#pragma once

#include "rtvae/data/raw_table.hpp"
#include "rtvae/data/schema.hpp"
#include "rtvae/numerics/matrix.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rtvae {

/// Placement of one source column inside an encoded row.
struct FeatureSlot {
    std::string column;
    ColumnKind kind = ColumnKind::continuous;
    std::size_t offset = 0;
    std::size_t width = 0;
    bool operator==(const FeatureSlot&) const = default;
};

using FeatureLayout = std::vector<FeatureSlot>;

/// Encoded width of a layout (sum of slot widths).
std::size_t layout_width(const FeatureLayout& layout);

/// Fitted encoding of a single feature column.
///
/// Categorical: `vocabulary` in first-occurrence order, UNK at index
/// vocabulary.size(). Continuous: population mean and std (1 for constants).
struct ColumnEncoding {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::string> vocabulary;
    double mean = 0.0;
    double stddev = 1.0;

    std::size_t width() const noexcept {
        return kind == ColumnKind::categorical ? vocabulary.size() + 1 : 1;
    }
    std::size_t unk_index() const noexcept { return vocabulary.size(); }

    bool operator==(const ColumnEncoding&) const = default;
};

struct EncoderState {
    std::vector<ColumnEncoding> columns;

    FeatureLayout layout() const;
    /// 16 hex digits identifying this exact fitted state.
    std::string fingerprint() const;

    bool operator==(const EncoderState&) const = default;
};

void to_json(nlohmann::json& j, const EncoderState& state);
void from_json(const nlohmann::json& j, EncoderState& state);

/// Model-ready rows: one-hot blocks for categoricals, z-scores for continuous.
struct EncodedDataset {
    Matrix x;
    FeatureLayout layout;
    /// Per-row ground truth; empty when unknown.
    std::vector<Label> labels;
    /// Fingerprint of the EncoderState that produced `x`.
    std::string fingerprint;

    std::size_t rows() const noexcept { return x.rows(); }
    bool has_labels() const noexcept { return !labels.empty(); }
    std::size_t count(Label label) const;

    EncodedDataset select(std::span<const std::size_t> indices) const;
};

EncoderState fit_encoder(const RawTable& table);
EncodedDataset encode(const RawTable& table, const EncoderState& state);
/// Inverse of encode(). UNK slots decode to "<UNK>".
RawTable decode(const EncodedDataset& ds, const EncoderState& state);

} // namespace rtvae
