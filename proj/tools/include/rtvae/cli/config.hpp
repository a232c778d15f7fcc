#pragma once

#include "rtvae/eval/sweep.hpp"
#include "rtvae/trainer/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace rtvae::cli {

enum class DataSource { synthetic, csv };

struct DataConfig {
    DataSource source = DataSource::synthetic;
    std::filesystem::path train;
    std::filesystem::path test;
    std::filesystem::path schema;
    bool header = true;
    /// Size of each contaminated training set.
    std::size_t train_rows = 5000;
    /// Test subsample for CSV sources; all rows when unset.
    std::optional<std::size_t> test_rows;
    /// Contamination injected by `train` and `gridsearch`; the data is used
    /// as-is when unset.
    std::optional<double> contamination;
};

/// Declarative description of one run. Relative paths are resolved against
/// the directory holding the config file.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    std::size_t threads = 1;

    DataConfig data;
    SyntheticSource synthetic;

    /// Training settings; `train.beta` is used unless `grid` is set.
    TrainConfig train;
    bool grid = false;
    std::vector<Beta> beta_grid = default_beta_grid();

    std::vector<double> rates{0.0, 0.01, 0.02, 0.05, 0.10};
    /// Defaults to {seed, seed + 1, seed + 2}.
    std::optional<std::vector<std::uint64_t>> seeds;
    /// Fixed robust beta for sweeps; grid search when unset.
    std::optional<Beta> rtvae_beta;
    bool save_models = false;

    std::vector<std::uint64_t> sweep_seeds() const;
    SweepConfig sweep_config() const;
    /// Checks value ranges and that referenced input files exist.
    void validate() const;
};

/// Parses a TOML config. `base_dir` anchors relative paths. Throws
/// ParseError for malformed documents and unknown keys.
ExperimentConfig parse_config(std::string_view toml_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace rtvae::cli
