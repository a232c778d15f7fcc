#include "rtvae/data/sampling.hpp"
#include "rtvae/errors.hpp"
#include "rtvae/eval/synthetic.hpp"
#include "rtvae/trainer/trainer.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace rtvae {
namespace {

EncodedDataset small_dataset(std::uint64_t seed, std::size_t rows = 240, double rate = 0.1) {
    SyntheticSpec spec = SyntheticSpec::default_spec();
    spec.normals = rows;
    spec.anomalies = rows / 4;
    Rng rng(seed);
    const auto [normals, anomalies] = generate_synthetic(spec, rng).encoded();
    return contaminate(normals, anomalies, rate, rows, rng);
}

TrainConfig small_config(std::size_t epochs = 4) {
    TrainConfig c;
    c.batch_size = 32;
    c.max_epochs = epochs;
    c.patience = 10;
    c.seed = 5;
    c.architecture.encoder_hidden = {8};
    c.architecture.decoder_hidden = {8};
    c.architecture.latent_dim = 2;
    return c;
}

TEST(Train, ZeroEpochsReturnsInitialParameters) {
    const EncodedDataset ds = small_dataset(1);
    TrainConfig c = small_config(0);
    const TrainResult a = train(ds, c);
    EXPECT_TRUE(a.history.epochs.empty());
    EXPECT_EQ(a.history.best_epoch, 0u);
    EXPECT_EQ(a.arch.layout, ds.layout);
    // Initialization does not depend on the split.
    c.split_seed = 99;
    EXPECT_EQ(train(ds, c).params, a.params);
    // Nonzero weights, zero biases.
    EXPECT_NE(a.params.encoder[0].weight, Matrix(ds.x.cols(), 8));
    EXPECT_EQ(a.params.encoder[0].bias, Matrix(1, 8));
}

TEST(Train, Deterministic) {
    const EncodedDataset ds = small_dataset(2);
    const TrainResult a = train(ds, small_config());
    const TrainResult b = train(ds, small_config());
    EXPECT_EQ(a.params, b.params);
    ASSERT_EQ(a.history.epochs.size(), b.history.epochs.size());
    for (std::size_t i = 0; i < a.history.epochs.size(); ++i) {
        EXPECT_EQ(a.history.epochs[i].train_loss.total, b.history.epochs[i].train_loss.total);
        EXPECT_EQ(a.history.epochs[i].val_auc, b.history.epochs[i].val_auc);
    }
    TrainConfig other = small_config();
    other.seed = 6;
    EXPECT_NE(train(ds, other).params, a.params);
}

TEST(Train, LossDecreasesOnRepeatedRow) {
    const EncodedDataset base = small_dataset(3);
    std::vector<std::size_t> same(64, 0);
    EncodedDataset ds = base.select(same);
    ds.labels.clear();
    TrainConfig c = small_config(15);
    c.batch_size = 8;
    c.adam.learning_rate = 1e-2;
    const TrainResult r = train(ds, c);
    EXPECT_EQ(r.history.metric, SelectionMetric::holdout_nll);
    ASSERT_EQ(r.history.epochs.size(), 15u);
    EXPECT_LT(r.history.epochs.back().train_loss.total,
              r.history.epochs.front().train_loss.total);
    EXPECT_TRUE(std::isnan(r.history.best_auc));
}

TEST(Train, UsesHoldoutAucWhenBothClassesPresent) {
    const TrainResult r = train(small_dataset(4), small_config());
    EXPECT_EQ(r.history.metric, SelectionMetric::holdout_auc);
    for (const auto& e : r.history.epochs) {
        EXPECT_EQ(e.selection_value, e.val_auc);
        EXPECT_GE(e.val_auc, 0.0);
        EXPECT_LE(e.val_auc, 1.0);
    }
}

TEST(TrainProperties, BestEpochIsFirstArgmaxOfSelection) {
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
        TrainConfig c = small_config(6);
        c.seed = seed;
        c.beta = Beta(seed % 2 == 0 ? 0.0 : 0.05);
        const TrainResult r = train(small_dataset(seed), c);
        const auto& ep = r.history.epochs;
        ASSERT_FALSE(ep.empty());
        const auto it = std::max_element(ep.begin(), ep.end(), [](const auto& a, const auto& b) {
            return a.selection_value < b.selection_value;
        });
        ASSERT_EQ(r.history.best_epoch, it->epoch);
        ASSERT_EQ(r.history.best_selection_value, it->selection_value);
        for (std::size_t i = 0; i < ep.size(); ++i) {
            ASSERT_EQ(ep[i].epoch, i + 1);
        }
    }
}

TEST(TrainProperties, PatienceBoundsEpochCount) {
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        TrainConfig c = small_config(40);
        c.seed = seed;
        c.patience = 2;
        const TrainResult r = train(small_dataset(seed), c);
        ASSERT_LE(r.history.epochs.size(), r.history.best_epoch + 2);
    }
}

TEST(TrainProperties, LossesFinite) {
    const TrainResult r = train(small_dataset(5), small_config());
    for (const auto& e : r.history.epochs) {
        EXPECT_TRUE(std::isfinite(e.train_loss.total));
        EXPECT_NEAR(e.train_loss.total,
                    e.train_loss.rec_categorical + e.train_loss.rec_continuous +
                        e.train_loss.kl_regularizer,
                    1e-9);
    }
}

TEST(Train, RejectsBadInput) {
    const EncodedDataset ds = small_dataset(6);
    EXPECT_THROW(train(ds.select(std::vector<std::size_t>{}), small_config()), DataError);
    TrainConfig c = small_config();
    c.batch_size = 0;
    EXPECT_THROW(train(ds, c), DataError);
    c = small_config();
    c.holdout_fraction = 1.0;
    EXPECT_THROW(train(ds, c), DataError);
}

TEST(HistoryCsv, OneLinePerEpoch) {
    const TrainResult r = train(small_dataset(7), small_config(3));
    const std::string csv = history_csv(r.history);
    EXPECT_EQ(csv.rfind("epoch,loss_total,loss_cat,loss_cont,loss_kl,val_auc\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(GridSearch, DefaultGrid) {
    const auto g = default_beta_grid();
    ASSERT_EQ(g.size(), 5u);
    const double expected[] = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(g[i].value(), expected[i]);
    }
}

TEST(GridSearch, SingleValueGridMatchesDirectTraining) {
    const EncodedDataset ds = small_dataset(8);
    const TrainConfig base = small_config(3);
    const GridSearchResult g = grid_search_beta(ds, base, {Beta(0.01)});
    EXPECT_EQ(g.best_beta, Beta(0.01));
    ASSERT_EQ(g.table.size(), 1u);
    TrainConfig direct = base;
    direct.beta = Beta(0.01);
    direct.split_seed = base.seed;
    direct.seed = grid_job_seed(base.seed, Beta(0.01));
    EXPECT_EQ(g.best.params, train(ds, direct).params);
}

TEST(GridSearch, TieGoesToSmallerBeta) {
    // No epochs: every job has the same (empty) selection value.
    const GridSearchResult g =
        grid_search_beta(small_dataset(9), small_config(0), {Beta(0.1), Beta(0.01), Beta(0.05)});
    EXPECT_EQ(g.best_beta, Beta(0.01));
}

TEST(GridSearch, PicksBestSelectionValue) {
    const EncodedDataset ds = small_dataset(10);
    const GridSearchResult g = grid_search_beta(ds, small_config(2), default_beta_grid());
    ASSERT_EQ(g.table.size(), 5u);
    double best = -INFINITY;
    for (const auto& e : g.table) {
        best = std::max(best, e.best_selection_value);
    }
    EXPECT_EQ(g.best.history.best_selection_value, best);
    const std::string csv = grid_table_csv(g, g.best.history.metric);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(GridSearch, ThreadCountDoesNotChangeResult) {
    const EncodedDataset ds = small_dataset(11);
    const std::vector<Beta> grid{Beta(1e-3), Beta(1e-2), Beta(1e-1)};
    const GridSearchResult a = grid_search_beta(ds, small_config(2), grid, 1);
    const GridSearchResult b = grid_search_beta(ds, small_config(2), grid, 3);
    EXPECT_EQ(a.best_beta, b.best_beta);
    EXPECT_EQ(a.best.params, b.best.params);
}

TEST(GridSearch, EmptyGridRejected) {
    EXPECT_THROW(grid_search_beta(small_dataset(12), small_config(1), {}), DataError);
}

TEST(GridSearch, JobSeedsDifferPerBeta) {
    EXPECT_NE(grid_job_seed(1, Beta(1e-3)), grid_job_seed(1, Beta(1e-2)));
    EXPECT_EQ(grid_job_seed(1, Beta(1e-3)), grid_job_seed(1, Beta(1e-3)));
}

} // namespace
} // namespace rtvae
