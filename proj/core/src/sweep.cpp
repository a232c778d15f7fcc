#include "rtvae/eval/sweep.hpp"

#include "rtvae/data/sampling.hpp"
#include "rtvae/errors.hpp"
#include "rtvae/eval/auc.hpp"
#include "rtvae/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <memory>

namespace rtvae {

std::vector<double> score_dataset(const TrainedModel& model, const EncodedDataset& ds) {
    if (ds.fingerprint != model.fingerprint()) {
        throw FingerprintMismatch(model.fingerprint(), ds.fingerprint);
    }
    if (ds.rows() == 0) {
        return {};
    }
    return score_rows(model.arch, model.params, ds.x);
}

std::string_view to_string(Variant variant) noexcept {
    return variant == Variant::vae ? "vae" : "rtvae";
}

namespace {

enum StreamId : std::uint64_t { kPoolStream = 10, kTestStream = 11, kSubsampleStream = 12 };

RawTable concat(const RawTable& a, const RawTable& b) {
    RawTable out = a;
    out.rows = a.rows + b.rows;
    for (std::size_t c = 0; c < out.columns.size(); ++c) {
        auto& dst = out.columns[c];
        const auto& src = b.columns.at(c);
        dst.categories.insert(dst.categories.end(), src.categories.begin(), src.categories.end());
        dst.values.insert(dst.values.end(), src.values.begin(), src.values.end());
    }
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    return out;
}

struct SeedData {
    TableSchema schema;
    RawTable normal_pool;
    RawTable anomaly_pool;
    RawTable test;
};

struct LoadedCsv {
    TableSchema schema;
    RawTable normals;
    RawTable anomalies;
    RawTable test;
};

SeedData synthetic_seed_data(const SyntheticSource& src, std::uint64_t seed) {
    Rng pool_rng = Rng::stream(seed, kPoolStream);
    SyntheticPools pools = generate_synthetic(src.spec, pool_rng);

    SyntheticSpec test_spec = src.spec;
    test_spec.normals = src.test_normals;
    test_spec.anomalies = src.test_anomalies;
    Rng test_rng = Rng::stream(seed, kTestStream);
    const SyntheticPools test = generate_synthetic(test_spec, test_rng);
    return {std::move(pools.schema), std::move(pools.normals), std::move(pools.anomalies),
            concat(test.normals, test.anomalies)};
}

LoadedCsv load_csv_source(const CsvSource& src) {
    const TableSchema schema = load_schema(src.schema);
    if (!schema.label) {
        throw DataError("sweep schema " + src.schema.string() + " has no label column");
    }
    const CsvOptions options{src.has_header};
    const RawTable train = ingest_csv(src.train_csv, schema, options);
    return {schema, train.filter(Label::normal), train.filter(Label::anomaly),
            ingest_csv(src.test_csv, schema, options)};
}

SeedData csv_seed_data(const CsvSource& src, const LoadedCsv& loaded, std::uint64_t seed) {
    SeedData data{loaded.schema, loaded.normals, loaded.anomalies, loaded.test};
    if (src.test_rows && *src.test_rows < loaded.test.rows) {
        Rng rng = Rng::stream(seed, kSubsampleStream);
        auto order = rng.permutation(loaded.test.rows);
        order.resize(*src.test_rows);
        std::sort(order.begin(), order.end());
        data.test = loaded.test.select(order);
    }
    return data;
}

struct CellOutcome {
    std::optional<SweepRow> vae;
    std::optional<SweepRow> rtvae;
    std::optional<TrainedModel> vae_model;
    std::optional<TrainedModel> rtvae_model;
    std::string failure;
};

double test_auc(const TrainResult& trained, const EncodedDataset& test) {
    return auc(score_rows(trained.arch, trained.params, test.x), test.labels);
}

CellOutcome run_cell(const SweepConfig& config, const SeedData& data, double rate,
                     std::uint64_t seed) {
    Rng contamination_rng = Rng::stream(seed, mix64(std::bit_cast<std::uint64_t>(rate)));
    const RawTable contaminated = contaminate(data.normal_pool, data.anomaly_pool, rate,
                                              config.train_rows, contamination_rng);
    const EncoderState encoder = fit_encoder(contaminated);
    const EncodedDataset train_set = encode(contaminated, encoder);
    const EncodedDataset test_set = encode(data.test, encoder);

    CellOutcome out;
    TrainConfig base = config.train;
    base.seed = seed;
    base.split_seed.reset();

    TrainConfig vae_config = base;
    vae_config.beta = Beta(0.0);
    TrainResult vae = train(train_set, vae_config);
    out.vae = SweepRow{rate, 0.0, Variant::vae, seed, test_auc(vae, test_set),
                       vae.history.best_epoch};

    Beta rt_beta = config.rtvae_beta.value_or(Beta(0.0));
    TrainResult rt;
    if (config.rtvae_beta) {
        TrainConfig rt_config = base;
        rt_config.beta = rt_beta;
        rt = train(train_set, rt_config);
    } else {
        GridSearchResult grid = grid_search_beta(train_set, base, config.beta_grid, 1);
        rt_beta = grid.best_beta;
        rt = std::move(grid.best);
    }
    out.rtvae = SweepRow{rate, rt_beta.value(), Variant::rtvae, seed, test_auc(rt, test_set),
                         rt.history.best_epoch};

    if (config.keep_models) {
        out.vae_model = TrainedModel{data.schema, encoder, std::move(vae.arch),
                                     std::move(vae.params), 0.0, seed};
        out.rtvae_model = TrainedModel{data.schema, encoder, std::move(rt.arch),
                                       std::move(rt.params), rt_beta.value(), seed};
    }
    return out;
}

} // namespace

SweepResult contamination_sweep(const SweepConfig& config) {
    if (config.rates.empty() || config.seeds.empty()) {
        throw DataError("sweep needs at least one rate and one seed");
    }
    config.train.validate();

    std::unique_ptr<LoadedCsv> loaded;
    if (const auto* csv = std::get_if<CsvSource>(&config.source)) {
        loaded = std::make_unique<LoadedCsv>(load_csv_source(*csv));
    }

    std::vector<SeedData> seed_data(config.seeds.size());
    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
        if (const auto* syn = std::get_if<SyntheticSource>(&config.source)) {
            seed_data[s] = synthetic_seed_data(*syn, config.seeds[s]);
        } else {
            seed_data[s] = csv_seed_data(std::get<CsvSource>(config.source), *loaded,
                                         config.seeds[s]);
        }
    }

    const std::size_t n_rates = config.rates.size();
    const std::size_t n_seeds = config.seeds.size();
    std::vector<CellOutcome> cells(n_rates * n_seeds);
    parallel_for(cells.size(), config.threads, [&](std::size_t i) {
        const std::size_t r = i / n_seeds;
        const std::size_t s = i % n_seeds;
        try {
            cells[i] = run_cell(config, seed_data[s], config.rates[r], config.seeds[s]);
        } catch (const std::exception& e) {
            cells[i].failure = fmt::format("rate {:g}, seed {}: {}", config.rates[r],
                                           config.seeds[s], e.what());
        }
    });

    SweepResult result;
    for (std::size_t r = 0; r < n_rates; ++r) {
        for (const Variant v : {Variant::vae, Variant::rtvae}) {
            for (std::size_t s = 0; s < n_seeds; ++s) {
                const CellOutcome& cell = cells[r * n_seeds + s];
                const auto& row = v == Variant::vae ? cell.vae : cell.rtvae;
                if (row) {
                    result.rows.push_back(*row);
                }
                const auto& model = v == Variant::vae ? cell.vae_model : cell.rtvae_model;
                if (row && model) {
                    result.models.push_back({row->rate, v, row->seed, *model});
                }
            }
        }
        for (std::size_t s = 0; s < n_seeds; ++s) {
            if (!cells[r * n_seeds + s].failure.empty()) {
                result.failures.push_back(cells[r * n_seeds + s].failure);
            }
        }
    }
    return result;
}

std::string SweepResult::csv() const {
    std::string out = "rate,beta,variant,seed,test_auc,best_epoch\n";
    for (const auto& r : rows) {
        out += fmt::format("{:g},{:g},{},{},{:.6f},{}\n", r.rate, r.beta, to_string(r.variant),
                           r.seed, r.test_auc, r.best_epoch);
    }
    return out;
}

std::string SweepResult::plot_csv() const {
    std::string out = "rate,variant,n,mean_auc,min_auc,max_auc\n";
    std::vector<std::pair<double, Variant>> groups;
    for (const auto& r : rows) {
        const std::pair key{r.rate, r.variant};
        if (std::find(groups.begin(), groups.end(), key) == groups.end()) {
            groups.push_back(key);
        }
    }
    for (const auto& [rate, variant] : groups) {
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        std::size_t n = 0;
        for (const auto& r : rows) {
            if (r.rate == rate && r.variant == variant) {
                sum += r.test_auc;
                lo = std::min(lo, r.test_auc);
                hi = std::max(hi, r.test_auc);
                ++n;
            }
        }
        out += fmt::format("{:g},{},{},{:.6f},{:.6f},{:.6f}\n", rate, to_string(variant), n,
                           sum / static_cast<double>(n), lo, hi);
    }
    return out;
}

double SweepResult::mean_auc(double rate, Variant variant) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.rate == rate && r.variant == variant) {
            sum += r.test_auc;
            ++n;
        }
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

} // namespace rtvae
