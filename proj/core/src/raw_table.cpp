#include "rtvae/data/raw_table.hpp"

#include "rtvae/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace rtvae {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) {
        return false;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

} // namespace

RawTable RawTable::select(std::span<const std::size_t> indices) const {
    RawTable out;
    out.rows = indices.size();
    out.columns.reserve(columns.size());
    for (const auto& col : columns) {
        RawColumn c{col.name, col.kind, {}, {}};
        if (col.kind == ColumnKind::categorical) {
            c.categories.reserve(indices.size());
            for (std::size_t i : indices) {
                c.categories.push_back(col.categories.at(i));
            }
        } else {
            c.values.reserve(indices.size());
            for (std::size_t i : indices) {
                c.values.push_back(col.values.at(i));
            }
        }
        out.columns.push_back(std::move(c));
    }
    if (has_labels()) {
        out.labels.reserve(indices.size());
        for (std::size_t i : indices) {
            out.labels.push_back(labels.at(i));
        }
    }
    return out;
}

RawTable RawTable::filter(Label label) const {
    if (!has_labels()) {
        throw DataError("filter by label on an unlabeled table");
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < rows; ++i) {
        if (labels[i] == label) {
            keep.push_back(i);
        }
    }
    return select(keep);
}

RawTable empty_table(const TableSchema& schema) {
    RawTable table;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        if (schema.is_feature(i)) {
            table.columns.push_back({schema.columns[i].name, schema.columns[i].kind, {}, {}});
        }
    }
    return table;
}

RawTable read_csv(std::istream& in, const TableSchema& schema, const CsvOptions& options) {
    schema.validate();
    RawTable table = empty_table(schema);
    const auto label_index = schema.label_index();

    // Maps schema column index to RawTable column index (or npos).
    std::vector<std::size_t> target(schema.columns.size(), std::string::npos);
    for (std::size_t i = 0, k = 0; i < schema.columns.size(); ++i) {
        if (schema.is_feature(i)) {
            target[i] = k++;
        }
    }

    std::string line;
    std::vector<std::string_view> fields;
    std::size_t line_no = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (!saw_content) {
            saw_content = true;
            if (options.has_header) {
                continue;
            }
        }
        split_fields(line, fields);
        if (fields.size() != schema.columns.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(schema.columns.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (label_index && *label_index == i) {
                const auto& normals = schema.label->normal_values;
                const bool normal =
                    std::find(normals.begin(), normals.end(), fields[i]) != normals.end();
                table.labels.push_back(normal ? Label::normal : Label::anomaly);
                continue;
            }
            if (target[i] == std::string::npos) {
                continue;
            }
            RawColumn& col = table.columns[target[i]];
            if (col.kind == ColumnKind::categorical) {
                col.categories.emplace_back(fields[i]);
            } else {
                double v = 0.0;
                if (!parse_double(fields[i], v)) {
                    throw ParseError("line " + std::to_string(line_no) + ", column " +
                                     std::to_string(i + 1) + " ('" + schema.columns[i].name +
                                     "'): cannot parse '" + std::string(fields[i]) +
                                     "' as a number");
                }
                col.values.push_back(v);
            }
        }
        ++table.rows;
    }
    if (!saw_content) {
        throw ParseError("CSV input is empty");
    }
    return table;
}

RawTable ingest_csv(const std::filesystem::path& path, const TableSchema& schema,
                    const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open CSV file " + path.string());
    }
    try {
        return read_csv(in, schema, options);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace rtvae
