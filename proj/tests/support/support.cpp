#include "support.hpp"

#include "rtvae/divergences/objective.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace rtvae::testing {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (double& v : m.values()) {
        v = lo + (hi - lo) * rng.uniform();
    }
    return m;
}

namespace {

double tensor_error(const Matrix& analytic, const Matrix& numeric) {
    double diff = 0.0;
    double na = 0.0;
    double nn = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double a = analytic.values()[i];
        const double n = numeric.values()[i];
        diff += (a - n) * (a - n);
        na += a * a;
        nn += n * n;
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-8});
}

/// Central differences of the tape's output with respect to each leaf in
/// `leaves`, re-evaluating through forward().
double compare(Tape& tape, NodeId output, const std::vector<NodeId>& leaves,
               const std::vector<Matrix>& values, double h) {
    const auto grads = tape.backward(output);
    double worst = 0.0;
    for (std::size_t p = 0; p < leaves.size(); ++p) {
        Matrix numeric(values[p].rows(), values[p].cols());
        Matrix probe = values[p];
        for (std::size_t i = 0; i < probe.size(); ++i) {
            const double x = values[p].values()[i];
            probe.values()[i] = x + h;
            tape.forward({{leaves[p], probe}});
            const double up = tape.value(output).item();
            probe.values()[i] = x - h;
            tape.forward({{leaves[p], probe}});
            const double down = tape.value(output).item();
            probe.values()[i] = x;
            numeric.values()[i] = (up - down) / (2.0 * h);
        }
        tape.forward({{leaves[p], values[p]}});
        worst = std::max(worst, tensor_error(grads.at(p).gradient, numeric));
    }
    return worst;
}

} // namespace

double max_gradient_error(const std::vector<Matrix>& params, const GraphBuilder& build, double h) {
    Tape tape;
    std::vector<NodeId> leaves;
    for (const auto& p : params) {
        leaves.push_back(tape.parameter(p));
    }
    const NodeId out = build(tape, leaves);
    return compare(tape, out, leaves, params, h);
}

double total_loss_gradient_error(const Architecture& arch, const ModelParams& params,
                                 const Matrix& batch, Beta beta, const Matrix& noise, double h) {
    Tape tape;
    const LossGraph graph = build_total_loss(tape, arch, params, batch, beta, noise);
    std::vector<NodeId> leaves;
    std::vector<Matrix> values;
    for (std::uint32_t i = 0; i < tape.size(); ++i) {
        if (tape.kind(NodeId{i}) == OpKind::parameter) {
            leaves.push_back(NodeId{i});
            values.push_back(tape.value(NodeId{i}));
        }
    }
    return compare(tape, graph.total, leaves, values, h);
}

Architecture random_architecture(Rng& rng, std::size_t categorical, std::size_t continuous) {
    Architecture arch;
    std::size_t offset = 0;
    std::size_t c = 0;
    std::size_t k = 0;
    while (c < categorical || k < continuous) {
        const bool cat = k == continuous || (c < categorical && rng.uniform() < 0.5);
        FeatureSlot slot;
        if (cat) {
            slot.column = "c" + std::to_string(c++);
            slot.kind = ColumnKind::categorical;
            slot.width = 2 + rng.uniform_index(3);
        } else {
            slot.column = "x" + std::to_string(k++);
            slot.kind = ColumnKind::continuous;
            slot.width = 1;
        }
        slot.offset = offset;
        offset += slot.width;
        arch.layout.push_back(slot);
    }
    arch.encoder_hidden = {5, 4};
    arch.decoder_hidden = {4, 5};
    arch.latent_dim = 3;
    return arch;
}

Matrix random_encoded_rows(Rng& rng, const FeatureLayout& layout, std::size_t rows) {
    Matrix m(rows, layout_width(layout));
    for (std::size_t r = 0; r < rows; ++r) {
        for (const auto& slot : layout) {
            if (slot.kind == ColumnKind::categorical) {
                m(r, slot.offset + rng.uniform_index(slot.width)) = 1.0;
            } else {
                m(r, slot.offset) = -2.0 + 4.0 * rng.uniform();
            }
        }
    }
    return m;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("rtvae-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
}

} // namespace rtvae::testing
