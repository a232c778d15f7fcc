#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/data/schema.hpp"
#include "rtvae/model/vae.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace rtvae {

/// Everything needed to score new rows: schema and fitted encoder for raw
/// input, plus architecture and weights.
struct TrainedModel {
    TableSchema schema;
    EncoderState encoder;
    Architecture arch;
    ModelParams params;
    double beta = 0.0;
    std::uint64_t seed = 0;

    std::string fingerprint() const { return encoder.fingerprint(); }
};

inline constexpr std::string_view kModelFormat = "rtvae-v1";

void to_json(nlohmann::json& j, const TableSchema& schema);
void from_json(const nlohmann::json& j, TableSchema& schema);
void to_json(nlohmann::json& j, const Architecture& arch);
void from_json(const nlohmann::json& j, Architecture& arch);

/// JSON document:
///   {"format": "rtvae-v1", "schema_fingerprint", "schema", "architecture",
///    "encoder_state", "weights": [{"name", "rows", "cols", "data"}], "beta", "seed"}
/// with weight data flattened row-major.
std::string serialize_model(const TrainedModel& model);
/// Validates format, fingerprint and every weight shape against the
/// architecture. Throws ParseError on any inconsistency.
TrainedModel parse_model(std::string_view text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace rtvae
