#include "rtvae/data/sampling.hpp"
#include "rtvae/divergences/objective.hpp"
#include "rtvae/eval/auc.hpp"
#include "rtvae/eval/synthetic.hpp"
#include "rtvae/trainer/trainer.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace rtvae;

void BM_Auc(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    ScoredSet set;
    for (std::size_t i = 0; i < n; ++i) {
        const bool anomaly = rng.uniform() < 0.2;
        set.labels.push_back(anomaly ? Label::anomaly : Label::normal);
        set.scores.push_back(rng.normal() + (anomaly ? 1.0 : 0.0));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(auc(set));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Arg(10'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

EncodedDataset synthetic_train_set(std::size_t rows) {
    SyntheticSpec spec = SyntheticSpec::default_spec();
    spec.normals = rows;
    spec.anomalies = rows / 10;
    Rng rng(2);
    const auto [normals, anomalies] = generate_synthetic(spec, rng).encoded();
    return contaminate(normals, anomalies, 0.05, rows, rng);
}

Architecture default_arch(const EncodedDataset& ds) {
    Architecture arch;
    arch.layout = ds.layout;
    return arch;
}

void BM_LossForwardBackward(benchmark::State& state) {
    const EncodedDataset ds = synthetic_train_set(1000);
    const Architecture arch = default_arch(ds);
    Rng rng(3);
    const ModelParams params = init_params(arch, rng);
    const auto batch_size = static_cast<std::size_t>(state.range(0));
    std::vector<std::size_t> idx(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        idx[i] = i;
    }
    const Matrix batch = ds.x.gather_rows(idx);
    const Matrix noise = rng.normal_matrix(batch_size, arch.latent_dim);
    const Beta beta(state.range(1) == 0 ? 0.0 : 0.01);
    for (auto _ : state) {
        Tape tape;
        build_total_loss(tape, arch, params, batch, beta, noise);
        benchmark::DoNotOptimize(tape.backward());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossForwardBackward)
    ->Args({16, 0})
    ->Args({256, 0})
    ->Args({256, 1})
    ->Unit(benchmark::kMicrosecond);

void BM_ScoreRows(benchmark::State& state) {
    const EncodedDataset ds = synthetic_train_set(static_cast<std::size_t>(state.range(0)));
    const Architecture arch = default_arch(ds);
    Rng rng(4);
    const ModelParams params = init_params(arch, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_rows(arch, params, ds.x));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreRows)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
    const EncodedDataset ds = synthetic_train_set(5000);
    TrainConfig config;
    config.max_epochs = 1;
    config.batch_size = static_cast<std::size_t>(state.range(0));
    config.beta = Beta(0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(ds, config));
    }
}
BENCHMARK(BM_TrainEpoch)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
