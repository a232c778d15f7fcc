#include "rtvae/data/schema.hpp"

#include "rtvae/errors.hpp"

#include <toml.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace rtvae {

std::string_view to_string(ColumnKind kind) noexcept {
    switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::ignore: return "ignore";
    }
    return "unknown";
}

ColumnKind parse_column_kind(std::string_view keyword) {
    if (keyword == "categorical") return ColumnKind::categorical;
    if (keyword == "continuous") return ColumnKind::continuous;
    if (keyword == "ignore") return ColumnKind::ignore;
    throw ParseError("unknown column kind '" + std::string(keyword) + "'");
}

void TableSchema::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& col : columns) {
        if (col.name.empty()) {
            throw ParseError("column with empty name");
        }
        if (!seen.insert(col.name).second) {
            throw ParseError("duplicate column '" + col.name + "'");
        }
    }
    if (label && !label_index()) {
        throw ParseError("label column '" + label->column + "' is not a declared column");
    }
    if (feature_count() == 0) {
        throw ParseError("schema declares no feature columns");
    }
}

std::optional<std::size_t> TableSchema::label_index() const {
    if (!label) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == label->column) {
            return i;
        }
    }
    return std::nullopt;
}

bool TableSchema::is_feature(std::size_t column_index) const {
    return columns.at(column_index).kind != ColumnKind::ignore &&
           label_index() != std::optional<std::size_t>(column_index);
}

std::size_t TableSchema::feature_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        n += is_feature(i) ? 1 : 0;
    }
    return n;
}

std::size_t TableSchema::count(ColumnKind kind) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        n += (is_feature(i) && columns[i].kind == kind) ? 1 : 0;
    }
    return n;
}

TableSchema parse_schema(std::string_view toml_text) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "schema: " << e.description() << " at line " << e.source().begin.line;
        throw ParseError(msg.str());
    }

    const toml::array* cols = doc["columns"].as_array();
    if (cols == nullptr) {
        throw ParseError("schema: missing columns section");
    }

    TableSchema schema;
    for (const auto& entry : *cols) {
        const toml::table* t = entry.as_table();
        if (t == nullptr) {
            throw ParseError("schema: columns entries must be tables with name and kind");
        }
        auto name = (*t)["name"].value<std::string>();
        auto kind = (*t)["kind"].value<std::string>();
        if (!name || !kind) {
            throw ParseError("schema: column entry missing name or kind");
        }
        schema.columns.push_back({*name, parse_column_kind(*kind)});
    }

    if (const toml::table* label = doc["label"].as_table()) {
        LabelSpec spec;
        auto column = (*label)["column"].value<std::string>();
        if (!column) {
            throw ParseError("schema: [label] requires a column");
        }
        spec.column = *column;
        if (const toml::array* normals = (*label)["normal_values"].as_array()) {
            for (const auto& v : *normals) {
                auto s = v.value<std::string>();
                if (!s) {
                    throw ParseError("schema: normal_values must be strings");
                }
                spec.normal_values.push_back(*s);
            }
        }
        schema.label = std::move(spec);
    }

    schema.validate();
    return schema;
}

TableSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open schema file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_schema(buffer.str());
}

} // namespace rtvae
