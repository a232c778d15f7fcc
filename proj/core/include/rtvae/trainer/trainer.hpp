#pragma once

#include "rtvae/data/encoder.hpp"
#include "rtvae/divergences/divergences.hpp"
#include "rtvae/divergences/objective.hpp"
#include "rtvae/model/vae.hpp"
#include "rtvae/trainer/adam.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rtvae {

struct TrainConfig {
    Beta beta{0.0};
    AdamSettings adam;
    std::size_t batch_size = 256;
    std::size_t max_epochs = 100;
    /// Evaluations without improvement before stopping.
    std::size_t patience = 10;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 0;
    /// Seed of the train/hold-out split; defaults to `seed`.
    std::optional<std::uint64_t> split_seed;
    /// Hidden widths, latent size, head and sigma. The feature layout is
    /// taken from the training data.
    Architecture architecture;

    void validate() const;
};

/// Which hold-out quantity drives early stopping and model selection.
enum class SelectionMetric : std::uint8_t {
    /// AUC against the hold-out labels (requires both classes).
    holdout_auc,
    /// Negated mean hold-out anomaly score; used for unlabeled or one-class
    /// hold-out sets.
    holdout_nll,
};

std::string_view to_string(SelectionMetric metric) noexcept;

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    /// Row-weighted mean over the epoch's minibatches.
    LossBreakdown train_loss;
    /// NaN when the hold-out set lacks a class.
    double val_auc = 0.0;
    double val_mean_score = 0.0;
    /// Larger is better.
    double selection_value = 0.0;
    double wall_seconds = 0.0;
};

struct TrainHistory {
    SelectionMetric metric = SelectionMetric::holdout_nll;
    std::vector<EpochRecord> epochs;
    /// 1-based epoch whose parameters were returned; 0 if no epoch ran.
    std::size_t best_epoch = 0;
    double best_selection_value = 0.0;
    /// NaN unless metric is holdout_auc.
    double best_auc = 0.0;
};

struct TrainResult {
    Architecture arch;
    ModelParams params;
    TrainHistory history;
};

/// Minibatch Adam on the robust objective with per-epoch hold-out
/// evaluation and early stopping.
///
/// The data is split once into train / hold-out. Each epoch visits every
/// training row exactly once in a fresh shuffled order (the last, partial
/// batch is kept). Parameters of the best-scoring epoch are returned.
TrainResult train(const EncodedDataset& ds, const TrainConfig& config);

/// Mean hold-out AUC or score for a fixed model, as train() records it.
struct HoldoutEvaluation {
    double auc = 0.0;  // NaN when undefined
    double mean_score = 0.0;
};
HoldoutEvaluation evaluate_holdout(const Architecture& arch, const ModelParams& params,
                                   const EncodedDataset& holdout);

/// Writes `epoch,loss_total,loss_cat,loss_cont,loss_kl,val_auc`.
std::string history_csv(const TrainHistory& history);

/// The logarithmic grid {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}.
std::vector<Beta> default_beta_grid();

struct GridEntry {
    Beta beta{0.0};
    std::size_t best_epoch = 0;
    double best_selection_value = 0.0;
    double best_auc = 0.0;
};

struct GridSearchResult {
    Beta best_beta{0.0};
    TrainResult best;
    std::vector<GridEntry> table;
};

/// Trains one model per beta on the same split and picks the best hold-out
/// selection value; ties go to the smaller beta. Each job's training seed is
/// seed ^ mix64(bits of beta); jobs may run on `threads` workers.
GridSearchResult grid_search_beta(const EncodedDataset& ds, const TrainConfig& base,
                                  const std::vector<Beta>& grid, std::size_t threads = 1);

/// Seed used for the job training `beta` in grid_search_beta.
std::uint64_t grid_job_seed(std::uint64_t seed, Beta beta);

/// Writes `beta,best_epoch,selection_metric,selection_value,val_auc`.
std::string grid_table_csv(const GridSearchResult& result, SelectionMetric metric);

} // namespace rtvae
