#include "rtvae/data/encoder.hpp"

#include "rtvae/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace rtvae {

std::size_t layout_width(const FeatureLayout& layout) {
    std::size_t w = 0;
    for (const auto& slot : layout) {
        w += slot.width;
    }
    return w;
}

FeatureLayout EncoderState::layout() const {
    FeatureLayout layout;
    std::size_t offset = 0;
    for (const auto& col : columns) {
        layout.push_back({col.name, col.kind, offset, col.width()});
        offset += col.width();
    }
    return layout;
}

std::string EncoderState::fingerprint() const {
    // FNV-1a over the canonical JSON form.
    const std::string canonical = nlohmann::json(*this).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void to_json(nlohmann::json& j, const EncoderState& state) {
    j = nlohmann::json::array();
    for (const auto& col : state.columns) {
        nlohmann::json c = {{"name", col.name}, {"kind", std::string(to_string(col.kind))}};
        if (col.kind == ColumnKind::categorical) {
            c["vocabulary"] = col.vocabulary;
        } else {
            c["mean"] = col.mean;
            c["std"] = col.stddev;
        }
        j.push_back(std::move(c));
    }
}

void from_json(const nlohmann::json& j, EncoderState& state) {
    if (!j.is_array()) {
        throw ParseError("encoder state must be an array of columns");
    }
    state.columns.clear();
    for (const auto& c : j) {
        ColumnEncoding col;
        col.name = c.at("name").get<std::string>();
        col.kind = parse_column_kind(c.at("kind").get<std::string>());
        if (col.kind == ColumnKind::categorical) {
            col.vocabulary = c.at("vocabulary").get<std::vector<std::string>>();
        } else if (col.kind == ColumnKind::continuous) {
            col.mean = c.at("mean").get<double>();
            col.stddev = c.at("std").get<double>();
            if (!(col.stddev > 0.0)) {
                throw ParseError("encoder column '" + col.name + "' has non-positive std");
            }
        } else {
            throw ParseError("encoder column '" + col.name + "' has kind ignore");
        }
        state.columns.push_back(std::move(col));
    }
}

std::size_t EncodedDataset::count(Label label) const {
    std::size_t n = 0;
    for (Label l : labels) {
        n += l == label ? 1 : 0;
    }
    return n;
}

EncodedDataset EncodedDataset::select(std::span<const std::size_t> indices) const {
    EncodedDataset out{x.gather_rows(indices), layout, {}, fingerprint};
    if (has_labels()) {
        out.labels.reserve(indices.size());
        for (std::size_t i : indices) {
            out.labels.push_back(labels.at(i));
        }
    }
    return out;
}

EncoderState fit_encoder(const RawTable& table) {
    if (table.rows == 0) {
        throw DataError("cannot fit an encoder on an empty table");
    }
    EncoderState state;
    for (const auto& col : table.columns) {
        ColumnEncoding enc{col.name, col.kind, {}, 0.0, 1.0};
        if (col.kind == ColumnKind::categorical) {
            std::unordered_map<std::string, std::size_t> seen;
            for (const auto& v : col.categories) {
                if (seen.emplace(v, enc.vocabulary.size()).second) {
                    enc.vocabulary.push_back(v);
                }
            }
        } else {
            double sum = 0.0;
            for (double v : col.values) {
                sum += v;
            }
            const double n = static_cast<double>(col.values.size());
            const double mean = sum / n;
            double ss = 0.0;
            for (double v : col.values) {
                ss += (v - mean) * (v - mean);
            }
            const double sd = std::sqrt(ss / n);
            enc.mean = mean;
            enc.stddev = sd > 0.0 ? sd : 1.0;
        }
        state.columns.push_back(std::move(enc));
    }
    return state;
}

EncodedDataset encode(const RawTable& table, const EncoderState& state) {
    if (table.columns.size() != state.columns.size()) {
        throw DataError("table has " + std::to_string(table.columns.size()) +
                        " feature columns, encoder expects " +
                        std::to_string(state.columns.size()));
    }
    EncodedDataset ds;
    ds.layout = state.layout();
    ds.fingerprint = state.fingerprint();
    ds.labels = table.labels;
    ds.x = Matrix(table.rows, layout_width(ds.layout));

    for (std::size_t c = 0; c < state.columns.size(); ++c) {
        const ColumnEncoding& enc = state.columns[c];
        const RawColumn& col = table.columns[c];
        if (col.name != enc.name || col.kind != enc.kind) {
            throw DataError("column " + std::to_string(c) + " is '" + col.name +
                            "' but encoder expects '" + enc.name + "'");
        }
        const std::size_t offset = ds.layout[c].offset;
        if (enc.kind == ColumnKind::categorical) {
            std::unordered_map<std::string_view, std::size_t> index;
            for (std::size_t k = 0; k < enc.vocabulary.size(); ++k) {
                index.emplace(enc.vocabulary[k], k);
            }
            for (std::size_t r = 0; r < table.rows; ++r) {
                const auto it = index.find(col.categories[r]);
                const std::size_t k = it == index.end() ? enc.unk_index() : it->second;
                ds.x(r, offset + k) = 1.0;
            }
        } else {
            for (std::size_t r = 0; r < table.rows; ++r) {
                ds.x(r, offset) = (col.values[r] - enc.mean) / enc.stddev;
            }
        }
    }
    return ds;
}

RawTable decode(const EncodedDataset& ds, const EncoderState& state) {
    if (ds.layout != state.layout()) {
        throw DataError("encoded layout does not match encoder state");
    }
    RawTable table;
    table.rows = ds.rows();
    table.labels = ds.labels;
    for (std::size_t c = 0; c < state.columns.size(); ++c) {
        const ColumnEncoding& enc = state.columns[c];
        const FeatureSlot& slot = ds.layout[c];
        RawColumn col{enc.name, enc.kind, {}, {}};
        for (std::size_t r = 0; r < ds.rows(); ++r) {
            if (enc.kind == ColumnKind::categorical) {
                std::size_t hot = 0;
                for (std::size_t k = 1; k < slot.width; ++k) {
                    if (ds.x(r, slot.offset + k) > ds.x(r, slot.offset + hot)) {
                        hot = k;
                    }
                }
                col.categories.push_back(hot < enc.vocabulary.size() ? enc.vocabulary[hot]
                                                                     : std::string("<UNK>"));
            } else {
                col.values.push_back(ds.x(r, slot.offset) * enc.stddev + enc.mean);
            }
        }
        table.columns.push_back(std::move(col));
    }
    return table;
}

} // namespace rtvae
