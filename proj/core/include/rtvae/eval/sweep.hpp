#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/data/raw_table.hpp"
#include "rtvae/eval/synthetic.hpp"
#include "rtvae/model/model_io.hpp"
#include "rtvae/trainer/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rtvae {

/// Per-row anomaly scores of `ds` under `model`, in row order.
/// Throws FingerprintMismatch if `ds` was encoded with another encoder.
std::vector<double> score_dataset(const TrainedModel& model, const EncodedDataset& ds);

enum class Variant : std::uint8_t { vae, rtvae };
std::string_view to_string(Variant variant) noexcept;

struct SyntheticSource {
    SyntheticSpec spec = SyntheticSpec::default_spec();
    std::size_t test_normals = 1000;
    std::size_t test_anomalies = 1000;
};

/// Labelled train/test CSVs of a real dataset. Attack rows of the training
/// file form the anomaly pool.
struct CsvSource {
    std::filesystem::path train_csv;
    std::filesystem::path test_csv;
    std::filesystem::path schema;
    bool has_header = false;
    /// Uniform subsample of the test file; all rows when unset.
    std::optional<std::size_t> test_rows;
};

struct SweepConfig {
    std::variant<SyntheticSource, CsvSource> source = SyntheticSource{};
    std::vector<double> rates{0.0, 0.01, 0.02, 0.05, 0.10};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    /// Size of every contaminated training set.
    std::size_t train_rows = 5000;
    /// Shared training settings; beta and seed are set per cell.
    TrainConfig train;
    /// Fixed robust beta; grid search over `beta_grid` when unset.
    std::optional<Beta> rtvae_beta;
    std::vector<Beta> beta_grid = default_beta_grid();
    std::size_t threads = 1;
    /// Return every trained model alongside its result row.
    bool keep_models = false;
};

struct SweepRow {
    double rate = 0.0;
    double beta = 0.0;
    Variant variant = Variant::vae;
    std::uint64_t seed = 0;
    double test_auc = 0.0;
    std::size_t best_epoch = 0;
};

struct SweepModel {
    double rate = 0.0;
    Variant variant = Variant::vae;
    std::uint64_t seed = 0;
    TrainedModel model;
};

struct SweepResult {
    /// Ordered by rate, then variant (vae first), then seed.
    std::vector<SweepRow> rows;
    /// Same order as `rows`; empty unless `keep_models` was set.
    std::vector<SweepModel> models;
    /// One message per failed (rate, seed) cell.
    std::vector<std::string> failures;

    /// `rate,beta,variant,seed,test_auc,best_epoch`, AUC with 6 decimals.
    std::string csv() const;
    /// `rate,variant,n,mean_auc,min_auc,max_auc` per (rate, variant).
    std::string plot_csv() const;

    /// Mean test AUC of one (rate, variant) group; NaN if empty.
    double mean_auc(double rate, Variant variant) const;
};

/// For every (rate, seed): contaminate the training pool, refit the encoder,
/// train a VAE (beta = 0) and an RTVAE (fixed or grid-selected beta), and
/// record AUC on the untouched test set. Cells run on `threads` workers;
/// results do not depend on the thread count. A failing cell is recorded in
/// `failures` and does not stop the others.
SweepResult contamination_sweep(const SweepConfig& config);

} // namespace rtvae
