#include "rtvae/cli/config.hpp"

#include "rtvae/errors.hpp"

#include <toml.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace rtvae::cli {

namespace {

namespace fs = std::filesystem;

void check_keys(const toml::table& table, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : table) {
        if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
            throw ParseError("unknown config key '" + std::string(where) +
                             std::string(key.str()) + "'");
        }
    }
}

std::string key_name(std::string_view where, std::string_view key) {
    return std::string(where) + std::string(key);
}

double get_double(const toml::table& t, std::string_view where, std::string_view key,
                  double fallback) {
    const auto node = t[key];
    if (!node) {
        return fallback;
    }
    if (const auto v = node.value<double>()) {
        return *v;
    }
    throw ParseError("config key '" + key_name(where, key) + "' must be a number");
}

std::size_t get_count(const toml::table& t, std::string_view where, std::string_view key,
                      std::size_t fallback) {
    const auto node = t[key];
    if (!node) {
        return fallback;
    }
    const auto v = node.value_exact<std::int64_t>();
    if (!v || *v < 0) {
        throw ParseError("config key '" + key_name(where, key) +
                         "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(*v);
}

bool get_bool(const toml::table& t, std::string_view where, std::string_view key,
              bool fallback) {
    const auto node = t[key];
    if (!node) {
        return fallback;
    }
    if (const auto v = node.value_exact<bool>()) {
        return *v;
    }
    throw ParseError("config key '" + key_name(where, key) + "' must be true or false");
}

std::optional<std::string> get_string(const toml::table& t, std::string_view where,
                                      std::string_view key) {
    const auto node = t[key];
    if (!node) {
        return std::nullopt;
    }
    if (const auto v = node.value_exact<std::string>()) {
        return *v;
    }
    throw ParseError("config key '" + key_name(where, key) + "' must be a string");
}

std::optional<fs::path> get_path(const toml::table& t, std::string_view where,
                                 std::string_view key, const fs::path& base) {
    const auto s = get_string(t, where, key);
    if (!s) {
        return std::nullopt;
    }
    const fs::path p(*s);
    return p.is_absolute() || base.empty() ? p : base / p;
}

template <class T, class Convert>
std::optional<std::vector<T>> get_array(const toml::table& t, std::string_view where,
                                        std::string_view key, Convert convert) {
    const auto node = t[key];
    if (!node) {
        return std::nullopt;
    }
    const toml::array* arr = node.as_array();
    if (!arr) {
        throw ParseError("config key '" + key_name(where, key) + "' must be an array");
    }
    std::vector<T> out;
    for (const auto& item : *arr) {
        const auto v = convert(item);
        if (!v) {
            throw ParseError("config key '" + key_name(where, key) +
                             "' has an element of the wrong type");
        }
        out.push_back(*v);
    }
    return out;
}

std::optional<double> as_double(const toml::node& n) { return n.value<double>(); }

std::optional<std::size_t> as_count(const toml::node& n) {
    const auto v = n.value_exact<std::int64_t>();
    if (!v || *v < 0) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(*v);
}

std::optional<std::uint64_t> as_seed(const toml::node& n) {
    const auto v = n.value_exact<std::int64_t>();
    if (!v || *v < 0) {
        return std::nullopt;
    }
    return static_cast<std::uint64_t>(*v);
}

std::vector<Beta> to_betas(const std::vector<double>& values) {
    std::vector<Beta> out;
    for (double v : values) {
        out.emplace_back(v);
    }
    return out;
}

/// Number, or the string "grid" (returns nullopt).
std::optional<Beta> get_beta_or_grid(const toml::table& t, std::string_view where,
                                     std::string_view key, bool& is_grid) {
    const auto node = t[key];
    is_grid = false;
    if (!node) {
        return std::nullopt;
    }
    if (const auto s = node.value_exact<std::string>()) {
        if (*s != "grid") {
            throw ParseError("config key '" + key_name(where, key) +
                             "' must be a number or \"grid\"");
        }
        is_grid = true;
        return std::nullopt;
    }
    if (const auto v = node.value<double>()) {
        return Beta(*v);
    }
    throw ParseError("config key '" + key_name(where, key) + "' must be a number or \"grid\"");
}

const toml::table* section(const toml::table& doc, std::string_view name) {
    const auto node = doc[name];
    if (!node) {
        return nullptr;
    }
    if (const toml::table* t = node.as_table()) {
        return t;
    }
    throw ParseError("config key '" + std::string(name) + "' must be a table");
}

void parse_data(const toml::table& t, const fs::path& base, DataConfig& data) {
    constexpr std::string_view w = "data.";
    check_keys(t, w,
               {"source", "train", "test", "schema", "header", "train_rows", "test_rows",
                "contamination"});
    if (const auto s = get_string(t, w, "source")) {
        if (*s == "synthetic") {
            data.source = DataSource::synthetic;
        } else if (*s == "csv") {
            data.source = DataSource::csv;
        } else {
            throw ParseError("config key 'data.source' must be \"synthetic\" or \"csv\", got '" +
                             *s + "'");
        }
    }
    data.train = get_path(t, w, "train", base).value_or(data.train);
    data.test = get_path(t, w, "test", base).value_or(data.test);
    data.schema = get_path(t, w, "schema", base).value_or(data.schema);
    data.header = get_bool(t, w, "header", data.header);
    data.train_rows = get_count(t, w, "train_rows", data.train_rows);
    if (t["test_rows"]) {
        data.test_rows = get_count(t, w, "test_rows", 0);
    }
    if (t["contamination"]) {
        data.contamination = get_double(t, w, "contamination", 0.0);
    }
}

void parse_synthetic(const toml::table& t, SyntheticSource& syn) {
    constexpr std::string_view w = "synthetic.";
    check_keys(t, w, {"normals", "anomalies", "test_normals", "test_anomalies"});
    syn.spec.normals = get_count(t, w, "normals", syn.spec.normals);
    syn.spec.anomalies = get_count(t, w, "anomalies", syn.spec.anomalies);
    syn.test_normals = get_count(t, w, "test_normals", syn.test_normals);
    syn.test_anomalies = get_count(t, w, "test_anomalies", syn.test_anomalies);
}

void parse_train(const toml::table& t, ExperimentConfig& cfg) {
    constexpr std::string_view w = "train.";
    check_keys(t, w,
               {"beta", "beta_grid", "learning_rate", "adam_beta1", "adam_beta2", "adam_epsilon",
                "batch_size", "max_epochs", "patience", "holdout_fraction", "encoder_hidden",
                "decoder_hidden", "latent_dim", "continuous_head", "observation_sigma"});
    TrainConfig& tc = cfg.train;
    if (const auto beta = get_beta_or_grid(t, w, "beta", cfg.grid)) {
        tc.beta = *beta;
    }
    if (const auto grid = get_array<double>(t, w, "beta_grid", as_double)) {
        cfg.beta_grid = to_betas(*grid);
    }
    tc.adam.learning_rate = get_double(t, w, "learning_rate", tc.adam.learning_rate);
    tc.adam.beta1 = get_double(t, w, "adam_beta1", tc.adam.beta1);
    tc.adam.beta2 = get_double(t, w, "adam_beta2", tc.adam.beta2);
    tc.adam.epsilon = get_double(t, w, "adam_epsilon", tc.adam.epsilon);
    tc.batch_size = get_count(t, w, "batch_size", tc.batch_size);
    tc.max_epochs = get_count(t, w, "max_epochs", tc.max_epochs);
    tc.patience = get_count(t, w, "patience", tc.patience);
    tc.holdout_fraction = get_double(t, w, "holdout_fraction", tc.holdout_fraction);

    Architecture& arch = tc.architecture;
    if (const auto h = get_array<std::size_t>(t, w, "encoder_hidden", as_count)) {
        arch.encoder_hidden = *h;
    }
    if (const auto h = get_array<std::size_t>(t, w, "decoder_hidden", as_count)) {
        arch.decoder_hidden = *h;
    }
    arch.latent_dim = get_count(t, w, "latent_dim", arch.latent_dim);
    if (const auto head = get_string(t, w, "continuous_head")) {
        arch.continuous_head = parse_continuous_head(*head);
    }
    arch.observation_sigma = get_double(t, w, "observation_sigma", arch.observation_sigma);
}

void parse_sweep(const toml::table& t, ExperimentConfig& cfg) {
    constexpr std::string_view w = "sweep.";
    check_keys(t, w, {"rates", "seeds", "rtvae_beta", "save_models"});
    if (const auto rates = get_array<double>(t, w, "rates", as_double)) {
        cfg.rates = *rates;
    }
    cfg.seeds = get_array<std::uint64_t>(t, w, "seeds", as_seed);
    bool grid = false;
    cfg.rtvae_beta = get_beta_or_grid(t, w, "rtvae_beta", grid);
    cfg.save_models = get_bool(t, w, "save_models", cfg.save_models);
}

void require_file(const fs::path& path, std::string_view what) {
    if (path.empty()) {
        throw DataError(std::string(what) + " path is not set");
    }
    if (!fs::is_regular_file(path)) {
        throw DataError(std::string(what) + " file not found: " + path.string());
    }
}

} // namespace

std::vector<std::uint64_t> ExperimentConfig::sweep_seeds() const {
    return seeds.value_or(std::vector<std::uint64_t>{seed, seed + 1, seed + 2});
}

SweepConfig ExperimentConfig::sweep_config() const {
    SweepConfig sc;
    if (data.source == DataSource::synthetic) {
        sc.source = synthetic;
    } else {
        sc.source = CsvSource{data.train, data.test, data.schema, data.header, data.test_rows};
    }
    sc.rates = rates;
    sc.seeds = sweep_seeds();
    sc.train_rows = data.train_rows;
    sc.train = train;
    sc.rtvae_beta = rtvae_beta;
    sc.beta_grid = beta_grid;
    sc.threads = threads;
    sc.keep_models = save_models;
    return sc;
}

void ExperimentConfig::validate() const {
    train.validate();
    if (threads == 0) {
        throw DataError("threads must be at least 1");
    }
    if (beta_grid.empty()) {
        throw DataError("train.beta_grid is empty");
    }
    if (rates.empty() || sweep_seeds().empty()) {
        throw DataError("sweep needs at least one rate and one seed");
    }
    for (double r : rates) {
        if (!(r >= 0.0 && r < 1.0)) {
            throw DataError("contamination rates must lie in [0, 1)");
        }
    }
    if (data.contamination && !(*data.contamination >= 0.0 && *data.contamination < 1.0)) {
        throw DataError("data.contamination must lie in [0, 1)");
    }
    if (data.source == DataSource::csv) {
        require_file(data.train, "data.train");
        require_file(data.schema, "data.schema");
        if (!data.test.empty()) {
            require_file(data.test, "data.test");
        }
    } else {
        synthetic.spec.validate();
    }
}

ExperimentConfig parse_config(std::string_view toml_text, const fs::path& base_dir) {
    toml::table doc;
    try {
        doc = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config is not valid TOML: " << e.description() << " (line "
            << e.source().begin.line << ")";
        throw ParseError(msg.str());
    }
    check_keys(doc, "",
               {"seed", "out_dir", "threads", "data", "synthetic", "train", "sweep"});

    ExperimentConfig cfg;
    if (doc["seed"]) {
        const auto seed = as_seed(*doc.get("seed"));
        if (!seed) {
            throw ParseError("config key 'seed' must be a nonnegative integer");
        }
        cfg.seed = *seed;
    }
    if (const auto out = get_path(doc, "", "out_dir", base_dir)) {
        cfg.out_dir = *out;
    } else if (!base_dir.empty()) {
        cfg.out_dir = base_dir / cfg.out_dir;
    }
    cfg.threads = get_count(doc, "", "threads", cfg.threads);

    try {
        if (const auto* t = section(doc, "data")) {
            parse_data(*t, base_dir, cfg.data);
        }
        if (const auto* t = section(doc, "synthetic")) {
            parse_synthetic(*t, cfg.synthetic);
        }
        if (const auto* t = section(doc, "train")) {
            parse_train(*t, cfg);
        }
        if (const auto* t = section(doc, "sweep")) {
            parse_sweep(*t, cfg);
        }
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("invalid config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open config file: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path());
}

} // namespace rtvae::cli
