#include "rtvae/data/sampling.hpp"

#include "rtvae/errors.hpp"

#include <cmath>

namespace rtvae {

namespace {

// First k entries of a partial Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace

SplitIndices split_indices(std::size_t n, double holdout_fraction, Rng& rng) {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw DataError("hold-out fraction must lie in (0, 1)");
    }
    const auto holdout = static_cast<std::size_t>(
        std::llround(holdout_fraction * static_cast<double>(n)));
    if (holdout == 0 || holdout >= n) {
        throw DataError("degenerate split: " + std::to_string(n - std::min(holdout, n)) +
                        " train rows, " + std::to_string(holdout) + " hold-out rows");
    }
    const auto order = rng.permutation(n);
    SplitIndices out;
    out.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(holdout));
    out.holdout.assign(order.end() - static_cast<std::ptrdiff_t>(holdout), order.end());
    return out;
}

std::pair<EncodedDataset, EncodedDataset> split(const EncodedDataset& ds,
                                                double holdout_fraction, Rng& rng) {
    const auto idx = split_indices(ds.rows(), holdout_fraction, rng);
    return {ds.select(idx.train), ds.select(idx.holdout)};
}

std::size_t ContaminationPlan::anomaly_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) {
        n += r.source == Label::anomaly ? 1 : 0;
    }
    return n;
}

ContaminationPlan plan_contamination(std::size_t normal_pool, std::size_t anomaly_pool,
                                     double rate, std::size_t total, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw DataError("contamination rate must lie in [0, 1)");
    }
    const auto n_anomaly =
        static_cast<std::size_t>(std::llround(rate * static_cast<double>(total)));
    const std::size_t n_normal = total - n_anomaly;
    if (n_anomaly > anomaly_pool) {
        throw DataError("anomaly pool has " + std::to_string(anomaly_pool) + " rows, " +
                        std::to_string(n_anomaly) + " requested");
    }
    if (n_normal > normal_pool) {
        throw DataError("normal pool has " + std::to_string(normal_pool) + " rows, " +
                        std::to_string(n_normal) + " requested");
    }

    ContaminationPlan plan;
    plan.rows.reserve(total);
    for (std::size_t i : sample_without_replacement(normal_pool, n_normal, rng)) {
        plan.rows.push_back({Label::normal, i});
    }
    for (std::size_t i : sample_without_replacement(anomaly_pool, n_anomaly, rng)) {
        plan.rows.push_back({Label::anomaly, i});
    }
    const auto order = rng.permutation(plan.rows.size());
    std::vector<ContaminationPlan::Row> shuffled;
    shuffled.reserve(order.size());
    for (std::size_t i : order) {
        shuffled.push_back(plan.rows[i]);
    }
    plan.rows = std::move(shuffled);
    return plan;
}

EncodedDataset contaminate(const EncodedDataset& normals, const EncodedDataset& anomaly_pool,
                           double rate, std::size_t total, Rng& rng) {
    if (normals.layout != anomaly_pool.layout) {
        throw DataError("normal and anomaly pools have different layouts");
    }
    const auto plan = plan_contamination(normals.rows(), anomaly_pool.rows(), rate, total, rng);
    EncodedDataset out;
    out.layout = normals.layout;
    out.fingerprint = normals.fingerprint;
    out.x = Matrix(total, normals.x.cols());
    out.labels.reserve(total);
    for (std::size_t r = 0; r < plan.rows.size(); ++r) {
        const auto& src = plan.rows[r];
        const Matrix& from = src.source == Label::anomaly ? anomaly_pool.x : normals.x;
        const auto row = from.row(src.index);
        std::copy(row.begin(), row.end(), out.x.row(r).begin());
        out.labels.push_back(src.source);
    }
    return out;
}

RawTable contaminate(const RawTable& normals, const RawTable& anomaly_pool, double rate,
                     std::size_t total, Rng& rng) {
    if (normals.columns.size() != anomaly_pool.columns.size()) {
        throw DataError("normal and anomaly pools have different columns");
    }
    const auto plan = plan_contamination(normals.rows, anomaly_pool.rows, rate, total, rng);
    RawTable out;
    out.rows = total;
    for (std::size_t c = 0; c < normals.columns.size(); ++c) {
        const RawColumn& n = normals.columns[c];
        const RawColumn& a = anomaly_pool.columns[c];
        if (n.name != a.name || n.kind != a.kind) {
            throw DataError("normal and anomaly pools have different columns");
        }
        RawColumn col{n.name, n.kind, {}, {}};
        for (const auto& src : plan.rows) {
            const RawColumn& from = src.source == Label::anomaly ? a : n;
            if (col.kind == ColumnKind::categorical) {
                col.categories.push_back(from.categories[src.index]);
            } else {
                col.values.push_back(from.values[src.index]);
            }
        }
        out.columns.push_back(std::move(col));
    }
    for (const auto& src : plan.rows) {
        out.labels.push_back(src.source);
    }
    return out;
}

} // namespace rtvae
