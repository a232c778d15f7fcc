#include "rtvae/eval/synthetic.hpp"

#include "rtvae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rtvae {

SyntheticSpec SyntheticSpec::default_spec() {
    SyntheticSpec spec;
    spec.continuous = {{"x0", 0.0, 1.0, 4.0, 1.0}, {"x1", 0.0, 1.0, 4.0, 1.0}};
    spec.categorical = {{"c0", {"a", "b"}, {0.9, 0.1}, {0.1, 0.9}}};
    return spec;
}

void SyntheticSpec::validate() const {
    if (continuous.empty() && categorical.empty()) {
        throw DataError("synthetic spec declares no columns");
    }
    for (const auto& c : continuous) {
        if (!(c.normal_std > 0.0) || !(c.anomaly_std > 0.0)) {
            throw DataError("synthetic column '" + c.name + "' needs positive spreads");
        }
    }
    for (const auto& c : categorical) {
        if (c.categories.empty() || c.normal_probs.size() != c.categories.size() ||
            c.anomaly_probs.size() != c.categories.size()) {
            throw DataError("synthetic column '" + c.name +
                            "' needs one probability per category and class");
        }
        for (const auto* probs : {&c.normal_probs, &c.anomaly_probs}) {
            const double total = std::accumulate(probs->begin(), probs->end(), 0.0);
            if (std::abs(total - 1.0) > 1e-9 ||
                std::any_of(probs->begin(), probs->end(), [](double p) { return p < 0.0; })) {
                throw DataError("synthetic column '" + c.name +
                                "' probabilities must be nonnegative and sum to 1");
            }
        }
    }
    schema().validate();
}

TableSchema SyntheticSpec::schema() const {
    TableSchema schema;
    for (const auto& c : continuous) {
        schema.columns.push_back({c.name, ColumnKind::continuous});
    }
    for (const auto& c : categorical) {
        schema.columns.push_back({c.name, ColumnKind::categorical});
    }
    schema.columns.push_back({"label", ColumnKind::categorical});
    schema.label = LabelSpec{"label", {"normal"}};
    return schema;
}

namespace {

std::size_t draw_category(const std::vector<double>& probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) {
            return k;
        }
    }
    return probs.size() - 1;
}

RawTable draw(const SyntheticSpec& spec, Label label, std::size_t rows, Rng& rng) {
    RawTable table = empty_table(spec.schema());
    table.rows = rows;
    const bool anomaly = label == Label::anomaly;
    // Row-major draws so a pool's prefix does not depend on its size.
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t col = 0;
        for (const auto& c : spec.continuous) {
            const double mean = anomaly ? c.anomaly_mean : c.normal_mean;
            const double sd = anomaly ? c.anomaly_std : c.normal_std;
            table.columns[col++].values.push_back(mean + sd * rng.normal());
        }
        for (const auto& c : spec.categorical) {
            const auto k = draw_category(anomaly ? c.anomaly_probs : c.normal_probs, rng);
            table.columns[col++].categories.push_back(c.categories[k]);
        }
    }
    table.labels.assign(rows, label);
    return table;
}

} // namespace

SyntheticPools generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
    spec.validate();
    SyntheticPools pools;
    pools.schema = spec.schema();
    pools.normals = draw(spec, Label::normal, spec.normals, rng);
    pools.anomalies = draw(spec, Label::anomaly, spec.anomalies, rng);
    return pools;
}

std::pair<EncodedDataset, EncodedDataset> SyntheticPools::encoded() const {
    const EncoderState state = fit_encoder(normals);
    return {encode(normals, state), encode(anomalies, state)};
}

} // namespace rtvae
