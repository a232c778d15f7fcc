#include "rtvae/model/model_io.hpp"

#include "rtvae/atomic_write.hpp"
#include "rtvae/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace rtvae {

void to_json(nlohmann::json& j, const TableSchema& schema) {
    j = nlohmann::json::object();
    auto cols = nlohmann::json::array();
    for (const auto& c : schema.columns) {
        cols.push_back({{"name", c.name}, {"kind", std::string(to_string(c.kind))}});
    }
    j["columns"] = std::move(cols);
    if (schema.label) {
        j["label"] = {{"column", schema.label->column},
                      {"normal_values", schema.label->normal_values}};
    }
}

void from_json(const nlohmann::json& j, TableSchema& schema) {
    schema.columns.clear();
    for (const auto& c : j.at("columns")) {
        schema.columns.push_back(
            {c.at("name").get<std::string>(), parse_column_kind(c.at("kind").get<std::string>())});
    }
    schema.label.reset();
    if (j.contains("label")) {
        const auto& l = j.at("label");
        schema.label = LabelSpec{l.at("column").get<std::string>(),
                                 l.at("normal_values").get<std::vector<std::string>>()};
    }
    schema.validate();
}

void to_json(nlohmann::json& j, const Architecture& arch) {
    auto layout = nlohmann::json::array();
    for (const auto& s : arch.layout) {
        layout.push_back({{"column", s.column},
                          {"kind", std::string(to_string(s.kind))},
                          {"offset", s.offset},
                          {"width", s.width}});
    }
    j = {{"input_width", arch.input_width()},
         {"encoder_hidden", arch.encoder_hidden},
         {"latent_dim", arch.latent_dim},
         {"decoder_hidden", arch.decoder_hidden},
         {"continuous_head", std::string(to_string(arch.continuous_head))},
         {"observation_sigma", arch.observation_sigma},
         {"feature_layout", std::move(layout)}};
}

void from_json(const nlohmann::json& j, Architecture& arch) {
    arch.layout.clear();
    for (const auto& s : j.at("feature_layout")) {
        arch.layout.push_back({s.at("column").get<std::string>(),
                               parse_column_kind(s.at("kind").get<std::string>()),
                               s.at("offset").get<std::size_t>(), s.at("width").get<std::size_t>()});
    }
    arch.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
    arch.latent_dim = j.at("latent_dim").get<std::size_t>();
    arch.decoder_hidden = j.at("decoder_hidden").get<std::vector<std::size_t>>();
    arch.continuous_head = parse_continuous_head(j.at("continuous_head").get<std::string>());
    arch.observation_sigma = j.at("observation_sigma").get<double>();
    if (j.at("input_width").get<std::size_t>() != arch.input_width()) {
        throw ParseError("architecture input_width disagrees with its feature layout");
    }
    arch.validate();
}

std::string serialize_model(const TrainedModel& model) {
    nlohmann::json weights = nlohmann::json::array();
    const auto names = model.params.tensor_names();
    const auto tensors = model.params.tensors();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        weights.push_back({{"name", names[i]},
                           {"rows", tensors[i]->rows()},
                           {"cols", tensors[i]->cols()},
                           {"data", tensors[i]->data()}});
    }
    nlohmann::json doc = {{"format", kModelFormat},
                          {"schema_fingerprint", model.fingerprint()},
                          {"schema", model.schema},
                          {"architecture", model.arch},
                          {"encoder_state", model.encoder},
                          {"weights", std::move(weights)},
                          {"beta", model.beta},
                          {"seed", model.seed}};
    return doc.dump(1) + "\n";
}

TrainedModel parse_model(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format").get<std::string>() != kModelFormat) {
            throw ParseError("unsupported model format '" + doc.at("format").get<std::string>() +
                             "'");
        }
        TrainedModel model;
        model.schema = doc.at("schema").get<TableSchema>();
        model.encoder = doc.at("encoder_state").get<EncoderState>();
        model.arch = doc.at("architecture").get<Architecture>();
        model.beta = doc.at("beta").get<double>();
        model.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.at("schema_fingerprint").get<std::string>() != model.fingerprint()) {
            throw ParseError("model schema_fingerprint does not match its encoder state");
        }
        if (model.arch.layout != model.encoder.layout()) {
            throw ParseError("model architecture layout does not match its encoder state");
        }

        model.params = zero_params(model.arch);
        const auto names = model.params.tensor_names();
        const auto tensors = model.params.tensors();
        const auto& weights = doc.at("weights");
        if (weights.size() != tensors.size()) {
            throw ParseError("model has " + std::to_string(weights.size()) +
                             " weight arrays, architecture needs " +
                             std::to_string(tensors.size()));
        }
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            const auto& w = weights[i];
            const auto rows = w.at("rows").get<std::size_t>();
            const auto cols = w.at("cols").get<std::size_t>();
            if (w.at("name").get<std::string>() != names[i] || rows != tensors[i]->rows() ||
                cols != tensors[i]->cols()) {
                throw ParseError("weight " + std::to_string(i) + " ('" +
                                 w.at("name").get<std::string>() + "') does not match expected " +
                                 names[i] + " " + tensors[i]->shape_string());
            }
            *tensors[i] = Matrix::checked(rows, cols, w.at("data").get<std::vector<double>>());
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const ShapeError& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const NumericError& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const DataError& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    write_file_atomically(path, serialize_model(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open model file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

} // namespace rtvae
