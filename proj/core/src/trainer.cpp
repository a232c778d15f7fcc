#include "rtvae/trainer/trainer.hpp"

#include "rtvae/data/sampling.hpp"
#include "rtvae/errors.hpp"
#include "rtvae/eval/auc.hpp"
#include "rtvae/numerics/rng.hpp"
#include "rtvae/parallel.hpp"

#include <fmt/format.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <limits>

namespace rtvae {

namespace {

enum StreamId : std::uint64_t { kSplitStream = 1, kInitStream = 2, kShuffleStream = 3, kNoiseStream = 4 };

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double v, const char* spec) {
    if (std::isnan(v)) {
        return "nan";
    }
    return fmt::format(fmt::runtime(spec), v);
}

} // namespace

std::string_view to_string(SelectionMetric metric) noexcept {
    return metric == SelectionMetric::holdout_auc ? "holdout_auc" : "holdout_nll";
}

void TrainConfig::validate() const {
    adam.validate();
    if (batch_size == 0) {
        throw DataError("batch_size must be at least 1");
    }
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw DataError("holdout_fraction must lie in (0, 1)");
    }
}

HoldoutEvaluation evaluate_holdout(const Architecture& arch, const ModelParams& params,
                                   const EncodedDataset& holdout) {
    const auto scores = score_rows(arch, params, holdout.x);
    HoldoutEvaluation out;
    double sum = 0.0;
    for (double s : scores) {
        sum += s;
    }
    out.mean_score = scores.empty() ? kNaN : sum / static_cast<double>(scores.size());
    out.auc = has_both_classes(holdout.labels) ? auc(scores, holdout.labels) : kNaN;
    return out;
}

TrainResult train(const EncodedDataset& ds, const TrainConfig& config) {
    config.validate();
    if (ds.rows() == 0) {
        throw DataError("cannot train on an empty dataset");
    }

    TrainResult result;
    result.arch = config.architecture;
    result.arch.layout = ds.layout;
    result.arch.validate();

    Rng split_rng = Rng::stream(config.split_seed.value_or(config.seed), kSplitStream);
    Rng init_rng = Rng::stream(config.seed, kInitStream);
    Rng shuffle_rng = Rng::stream(config.seed, kShuffleStream);
    Rng noise_rng = Rng::stream(config.seed, kNoiseStream);

    const auto [train_set, holdout] = split(ds, config.holdout_fraction, split_rng);
    result.params = init_params(result.arch, init_rng);

    TrainHistory& history = result.history;
    history.metric = has_both_classes(holdout.labels) ? SelectionMetric::holdout_auc
                                                      : SelectionMetric::holdout_nll;
    history.best_selection_value = -std::numeric_limits<double>::infinity();
    history.best_auc = kNaN;
    if (config.max_epochs == 0) {
        return result;
    }

    ModelParams params = result.params;
    AdamState adam = AdamState::zeros_like(params);
    const std::size_t batch_size = std::min(config.batch_size, train_set.rows());
    std::size_t stale = 0;
    std::vector<Matrix> grads;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const auto order = shuffle_rng.permutation(train_set.rows());
        LossBreakdown sums;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            const Matrix batch = train_set.x.gather_rows(idx);
            const Matrix noise = noise_rng.normal_matrix(batch.rows(), result.arch.latent_dim);

            Tape tape;
            const LossGraph graph =
                build_total_loss(tape, result.arch, params, batch, config.beta, noise);
            const LossBreakdown loss = graph.breakdown(tape);
            if (!std::isfinite(loss.total)) {
                throw NumericError("non-finite training loss at epoch " + std::to_string(epoch));
            }
            auto param_grads = tape.backward(graph.total);
            grads.clear();
            for (auto& pg : param_grads) {
                grads.push_back(std::move(pg.gradient));
            }
            adam_step(params, grads, adam, config.adam);

            const auto w = static_cast<double>(batch.rows());
            sums.rec_categorical += w * loss.rec_categorical;
            sums.rec_continuous += w * loss.rec_continuous;
            sums.kl_regularizer += w * loss.kl_regularizer;
            sums.total += w * loss.total;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        const auto n = static_cast<double>(train_set.rows());
        rec.train_loss = {sums.rec_categorical / n, sums.rec_continuous / n,
                          sums.kl_regularizer / n, sums.total / n};
        const HoldoutEvaluation eval = evaluate_holdout(result.arch, params, holdout);
        rec.val_auc = eval.auc;
        rec.val_mean_score = eval.mean_score;
        rec.selection_value =
            history.metric == SelectionMetric::holdout_auc ? eval.auc : -eval.mean_score;
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        history.epochs.push_back(rec);

        if (rec.selection_value > history.best_selection_value) {
            history.best_selection_value = rec.selection_value;
            history.best_epoch = epoch;
            history.best_auc = rec.val_auc;
            result.params = params;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
    }
    return result;
}

std::string history_csv(const TrainHistory& history) {
    std::string out = "epoch,loss_total,loss_cat,loss_cont,loss_kl,val_auc\n";
    for (const auto& e : history.epochs) {
        out += fmt::format("{},{},{},{},{},{}\n", e.epoch, format_value(e.train_loss.total, "{:.9f}"),
                           format_value(e.train_loss.rec_categorical, "{:.9f}"),
                           format_value(e.train_loss.rec_continuous, "{:.9f}"),
                           format_value(e.train_loss.kl_regularizer, "{:.9f}"),
                           format_value(e.val_auc, "{:.6f}"));
    }
    return out;
}

std::vector<Beta> default_beta_grid() {
    return {Beta(1e-5), Beta(1e-4), Beta(1e-3), Beta(1e-2), Beta(1e-1)};
}

std::uint64_t grid_job_seed(std::uint64_t seed, Beta beta) {
    return seed ^ mix64(std::bit_cast<std::uint64_t>(beta.value()));
}

GridSearchResult grid_search_beta(const EncodedDataset& ds, const TrainConfig& base,
                                  const std::vector<Beta>& grid, std::size_t threads) {
    if (grid.empty()) {
        throw DataError("beta grid is empty");
    }
    std::vector<TrainResult> results(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        TrainConfig config = base;
        config.beta = grid[i];
        config.split_seed = base.split_seed.value_or(base.seed);
        config.seed = grid_job_seed(base.seed, grid[i]);
        results[i] = train(ds, config);
    });

    GridSearchResult out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const TrainHistory& h = results[i].history;
        out.table.push_back({grid[i], h.best_epoch, h.best_selection_value, h.best_auc});
        const double value = h.best_selection_value;
        const double incumbent = results[best].history.best_selection_value;
        if (i > 0 && (value > incumbent || (value == incumbent && grid[i] < grid[best]))) {
            best = i;
        }
    }
    out.best_beta = grid[best];
    out.best = std::move(results[best]);
    return out;
}

std::string grid_table_csv(const GridSearchResult& result, SelectionMetric metric) {
    std::string out = "beta,best_epoch,selection_metric,selection_value,val_auc\n";
    for (const auto& e : result.table) {
        out += fmt::format("{},{},{},{},{}\n", format_value(e.beta.value(), "{:g}"), e.best_epoch,
                           to_string(metric), format_value(e.best_selection_value, "{:.9f}"),
                           format_value(e.best_auc, "{:.6f}"));
    }
    return out;
}

} // namespace rtvae
