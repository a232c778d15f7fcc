#pragma once

#include "rtvae/data/schema.hpp"

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace rtvae {

/// One feature column of a RawTable. Exactly one of `categories` /
/// `values` is populated, according to `kind`.
struct RawColumn {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::string> categories;
    std::vector<double> values;

    bool operator==(const RawColumn&) const = default;
};

/// Parsed CSV rows, column-major, feature columns only.
struct RawTable {
    std::vector<RawColumn> columns;
    /// Empty when the schema has no label column.
    std::vector<Label> labels;
    std::size_t rows = 0;

    bool has_labels() const noexcept { return !labels.empty(); }

    /// Rows at `indices`, in that order.
    RawTable select(std::span<const std::size_t> indices) const;
    /// Rows whose label equals `label`. Requires labels.
    RawTable filter(Label label) const;

    bool operator==(const RawTable&) const = default;
};

/// Empty table carrying the feature columns of `schema`.
RawTable empty_table(const TableSchema& schema);

struct CsvOptions {
    bool has_header = false;
};

/// Reads comma-separated rows. Fields are whitespace-trimmed; blank lines
/// are skipped. Field-count and numeric errors name the 1-based line (and
/// column for numerics).
RawTable read_csv(std::istream& in, const TableSchema& schema, const CsvOptions& options = {});
RawTable ingest_csv(const std::filesystem::path& path, const TableSchema& schema,
                    const CsvOptions& options = {});

} // namespace rtvae
