#include "rtvae/cli/app.hpp"

#include "rtvae/atomic_write.hpp"
#include "rtvae/cli/config.hpp"
#include "rtvae/data/dataset_io.hpp"
#include "rtvae/data/sampling.hpp"
#include "rtvae/errors.hpp"
#include "rtvae/eval/sweep.hpp"
#include "rtvae/model/model_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rtvae::cli {

namespace {

namespace fs = std::filesystem;

enum StreamId : std::uint64_t { kPoolStream = 10, kContaminationStream = 20 };

struct GlobalOptions {
    std::optional<fs::path> config;
    std::optional<fs::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

std::uint64_t parse_seed_env(const char* text) {
    const std::string_view s(text);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
        throw DataError("RTVAE_SEED must be a nonnegative integer, got '" + std::string(s) + "'");
    }
    return value;
}

/// Config file (or defaults), then RTVAE_SEED, then command-line flags.
ExperimentConfig resolve_config(const GlobalOptions& g) {
    ExperimentConfig cfg = g.config ? load_config(*g.config) : ExperimentConfig{};
    std::optional<std::uint64_t> seed;
    if (const char* env = std::getenv("RTVAE_SEED"); env != nullptr && *env != '\0') {
        seed = parse_seed_env(env);
    }
    if (g.seed) {
        seed = g.seed;
    }
    if (seed) {
        cfg.seed = *seed;
        cfg.seeds.reset();
    }
    if (g.out_dir) {
        cfg.out_dir = *g.out_dir;
    }
    if (g.threads) {
        cfg.threads = *g.threads;
    }
    cfg.validate();
    return cfg;
}

bool is_dataset_cache(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[5] = {};
    in.read(magic, sizeof magic);
    return in.gcount() == 5 && std::string_view(magic, 5) == "RTVD1";
}

std::string format_auc(double v) {
    return std::isnan(v) ? std::string("n/a") : fmt::format("{:.6f}", v);
}

struct TrainingTable {
    TableSchema schema;
    RawTable table;
};

TrainingTable training_table(const ExperimentConfig& cfg) {
    const double rate = cfg.data.contamination.value_or(0.0);
    Rng contamination_rng = Rng::stream(cfg.seed, kContaminationStream);
    if (cfg.data.source == DataSource::synthetic) {
        Rng pool_rng = Rng::stream(cfg.seed, kPoolStream);
        SyntheticPools pools = generate_synthetic(cfg.synthetic.spec, pool_rng);
        return {pools.schema, contaminate(pools.normals, pools.anomalies, rate,
                                          cfg.data.train_rows, contamination_rng)};
    }
    TrainingTable out{load_schema(cfg.data.schema), {}};
    RawTable raw = ingest_csv(cfg.data.train, out.schema, CsvOptions{cfg.data.header});
    if (cfg.data.contamination) {
        if (!raw.has_labels()) {
            throw DataError("data.contamination needs a labelled training file");
        }
        raw = contaminate(raw.filter(Label::normal), raw.filter(Label::anomaly), rate,
                          cfg.data.train_rows, contamination_rng);
    }
    out.table = std::move(raw);
    return out;
}

int cmd_train(const GlobalOptions& g, bool force_grid, std::ostream& out) {
    const ExperimentConfig cfg = resolve_config(g);
    const TrainingTable tt = training_table(cfg);
    const EncoderState encoder = fit_encoder(tt.table);
    const EncodedDataset ds = encode(tt.table, encoder);

    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    TrainResult result;
    Beta beta = tc.beta;
    fs::create_directories(cfg.out_dir);
    if (cfg.grid || force_grid) {
        GridSearchResult grid = grid_search_beta(ds, tc, cfg.beta_grid, cfg.threads);
        beta = grid.best_beta;
        result = std::move(grid.best);
        write_file_atomically(cfg.out_dir / "grid.csv",
                              grid_table_csv(grid, result.history.metric));
        out << grid_table_csv(grid, result.history.metric);
    } else {
        result = train(ds, tc);
    }

    const TrainedModel model{tt.schema, encoder, result.arch, result.params, beta.value(),
                             cfg.seed};
    save_model(cfg.out_dir / "model.json", model);
    write_file_atomically(cfg.out_dir / "history.csv", history_csv(result.history));

    const TrainHistory& h = result.history;
    out << fmt::format("trained on {} rows, beta {:g}, best epoch {} of {}\n", ds.rows(),
                       beta.value(), h.best_epoch, h.epochs.size());
    if (h.metric == SelectionMetric::holdout_auc) {
        out << "best hold-out AUC " << format_auc(h.best_auc) << "\n";
    } else {
        out << fmt::format("hold-out has one class; selected by mean hold-out score {:.6f}\n",
                           -h.best_selection_value);
    }
    out << "wrote " << (cfg.out_dir / "model.json").string() << "\n";
    return kExitOk;
}

struct IngestOptions {
    fs::path csv;
    std::optional<fs::path> schema;
    std::optional<fs::path> model;
    fs::path out;
    bool no_header = false;
};

int cmd_ingest(const IngestOptions& o, std::ostream& out) {
    TableSchema schema;
    std::optional<EncoderState> encoder;
    if (o.model) {
        TrainedModel model = load_model(*o.model);
        schema = std::move(model.schema);
        encoder = std::move(model.encoder);
    }
    if (o.schema) {
        schema = load_schema(*o.schema);
    }
    const RawTable table = ingest_csv(o.csv, schema, CsvOptions{!o.no_header});
    if (!encoder) {
        encoder = fit_encoder(table);
    }
    DatasetCache cache{encode(table, *encoder), *encoder};
    if (o.out.has_parent_path()) {
        fs::create_directories(o.out.parent_path());
    }
    save_dataset_cache(o.out, cache);
    out << fmt::format(
        "{} rows, {} feature columns ({} categorical, {} continuous), encoded width {}, "
        "labels {}\nfingerprint {}\nwrote {}\n",
        table.rows, table.columns.size(), schema.count(ColumnKind::categorical),
        schema.count(ColumnKind::continuous), cache.data.x.cols(),
        table.has_labels() ? fmt::format("{} normal / {} anomaly",
                                         cache.data.count(Label::normal),
                                         cache.data.count(Label::anomaly))
                           : std::string("none"),
        cache.data.fingerprint, o.out.string());
    return kExitOk;
}

struct ScoreOptions {
    fs::path model;
    fs::path data;
    fs::path out;
    bool no_header = false;
};

int cmd_score(const ScoreOptions& o, std::ostream& out) {
    const TrainedModel model = load_model(o.model);
    EncodedDataset ds;
    if (is_dataset_cache(o.data)) {
        ds = load_dataset_cache(o.data).data;
    } else {
        const RawTable table = ingest_csv(o.data, model.schema, CsvOptions{!o.no_header});
        ds = encode(table, model.encoder);
    }
    const std::vector<double> scores = score_dataset(model, ds);
    std::string csv = "row_index,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        csv += fmt::format("{},{:.10g}\n", i, scores[i]);
    }
    if (o.out.has_parent_path()) {
        fs::create_directories(o.out.parent_path());
    }
    write_file_atomically(o.out, csv);
    out << fmt::format("scored {} rows, wrote {}\n", scores.size(), o.out.string());
    return kExitOk;
}

std::string model_file_name(const SweepModel& m) {
    return fmt::format("rate-{:g}_{}_seed-{}.json", m.rate, to_string(m.variant), m.seed);
}

int cmd_experiment(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    const ExperimentConfig cfg = resolve_config(g);
    const SweepResult result = contamination_sweep(cfg.sweep_config());

    fs::create_directories(cfg.out_dir);
    write_file_atomically(cfg.out_dir / "sweep.csv", result.csv());
    write_file_atomically(cfg.out_dir / "sweep_plot.csv", result.plot_csv());
    if (cfg.save_models) {
        fs::create_directories(cfg.out_dir / "models");
        for (const auto& m : result.models) {
            save_model(cfg.out_dir / "models" / model_file_name(m), m.model);
        }
    }
    out << result.plot_csv();
    out << "wrote " << (cfg.out_dir / "sweep.csv").string() << "\n";
    for (const auto& f : result.failures) {
        err << "cell failed: " << f << "\n";
    }
    return result.failures.empty() ? kExitOk : kExitDataError;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robust VAE anomaly detection for mixed tabular data", "rtvae"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config, "TOML config file");
    app.add_option("--out-dir", g.out_dir, "Output directory (overrides config)");
    app.add_option("--seed", g.seed, "Base seed (overrides config and RTVAE_SEED)");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

    IngestOptions ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Encode a CSV file into a dataset cache");
    ingest_cmd->add_option("--csv", ingest.csv, "Input CSV")->required();
    auto* schema_opt = ingest_cmd->add_option("--schema", ingest.schema, "TOML schema");
    auto* model_opt =
        ingest_cmd->add_option("--model", ingest.model, "Reuse the schema and encoder of a model");
    schema_opt->excludes(model_opt);
    ingest_cmd->add_option("--out", ingest.out, "Output cache file")->required();
    ingest_cmd->add_flag("--no-header", ingest.no_header, "CSV has no header row");
    ingest_cmd->fallthrough();

    auto* train_cmd = app.add_subcommand("train", "Train one model");
    train_cmd->fallthrough();

    auto* grid_cmd = app.add_subcommand("gridsearch", "Train over the beta grid, keep the best");
    grid_cmd->fallthrough();

    ScoreOptions score;
    auto* score_cmd = app.add_subcommand("score", "Write per-row anomaly scores");
    score_cmd->add_option("--model", score.model, "Model JSON")->required();
    score_cmd->add_option("--data", score.data, "CSV file or dataset cache")->required();
    score_cmd->add_option("--out", score.out, "Output CSV")->required();
    score_cmd->add_flag("--no-header", score.no_header, "CSV has no header row");
    score_cmd->fallthrough();

    auto* experiment_cmd = app.add_subcommand("experiment", "Run a contamination sweep");
    experiment_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    if (*ingest_cmd && !ingest.schema && !ingest.model) {
        err << "error: ingest needs --schema or --model\n\n" << ingest_cmd->help();
        return kExitUsage;
    }

    try {
        if (*ingest_cmd) {
            return cmd_ingest(ingest, out);
        }
        if (*train_cmd) {
            return cmd_train(g, false, out);
        }
        if (*grid_cmd) {
            return cmd_train(g, true, out);
        }
        if (*score_cmd) {
            return cmd_score(score, out);
        }
        return cmd_experiment(g, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        if (const auto* mismatch = dynamic_cast<const FingerprintMismatch*>(&e)) {
            err << "model fingerprint: " << mismatch->expected() << "\n"
                << "data fingerprint:  " << mismatch->actual() << "\n";
        }
        return kExitDataError;
    }
}

} // namespace rtvae::cli
