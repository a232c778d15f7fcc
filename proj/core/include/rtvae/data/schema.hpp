#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rtvae {

/// `ignore` columns are read from CSV but never become features (row ids,
/// difficulty scores and the like).
enum class ColumnKind : std::uint8_t { categorical, continuous, ignore };

std::string_view to_string(ColumnKind kind) noexcept;
ColumnKind parse_column_kind(std::string_view keyword);

enum class Label : std::uint8_t { normal = 0, anomaly = 1 };

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    bool operator==(const ColumnSpec&) const = default;
};

/// Names the label column and the values that count as "normal"; every other
/// value is an anomaly.
struct LabelSpec {
    std::string column;
    std::vector<std::string> normal_values;
    bool operator==(const LabelSpec&) const = default;
};

/// Ordered column declarations of a CSV table.
///
/// The label column, when present, must be one of the declared columns; it
/// is excluded from the features.
struct TableSchema {
    std::vector<ColumnSpec> columns;
    std::optional<LabelSpec> label;

    /// Throws ParseError on duplicate names, a dangling label column or no
    /// feature column.
    void validate() const;

    bool is_feature(std::size_t column_index) const;
    std::size_t feature_count() const;
    std::size_t count(ColumnKind kind) const;
    std::optional<std::size_t> label_index() const;

    bool operator==(const TableSchema&) const = default;
};

/// Parses a TOML schema document:
///
///     [[columns]]
///     name = "protocol_type"
///     kind = "categorical"     # categorical | continuous | ignore
///
///     [label]
///     column = "label"
///     normal_values = ["normal"]
TableSchema parse_schema(std::string_view toml_text);
TableSchema load_schema(const std::filesystem::path& path);

} // namespace rtvae
