#include "rtvae/numerics/tape.hpp"

#include "rtvae/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rtvae {

std::string_view to_string(OpKind kind) noexcept {
    switch (kind) {
    case OpKind::constant: return "constant";
    case OpKind::parameter: return "parameter";
    case OpKind::matmul: return "matmul";
    case OpKind::add_row_broadcast: return "add-row-broadcast";
    case OpKind::tanh: return "tanh";
    case OpKind::softmax_rows: return "softmax-rows";
    case OpKind::exp: return "exp";
    case OpKind::log: return "log";
    case OpKind::power: return "power";
    case OpKind::scale: return "scale";
    case OpKind::add: return "add";
    case OpKind::subtract: return "subtract";
    case OpKind::multiply: return "multiply";
    case OpKind::sum_all: return "sum-all";
    case OpKind::sum_rows: return "sum-rows";
    case OpKind::mean_all: return "mean-all";
    case OpKind::column_slice: return "column-slice";
    case OpKind::column_concat: return "column-concat";
    case OpKind::square: return "square";
    case OpKind::negate: return "negate";
    case OpKind::clamp: return "clamp";
    }
    return "unknown";
}

namespace {

template <typename F>
Matrix map(const Matrix& m, F f) {
    Matrix out = m;
    for (double& v : out.values()) {
        v = f(v);
    }
    return out;
}

template <typename F>
Matrix zip(const Matrix& a, const Matrix& b, F f) {
    Matrix out = a;
    auto bv = b.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) {
        ov[i] = f(ov[i], bv[i]);
    }
    return out;
}

// acc += f(i) for every flat index.
template <typename F>
void accumulate(Matrix& acc, F f) {
    auto v = acc.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += f(i);
    }
}

} // namespace

NodeId Tape::append(Node n) {
    for (NodeId in : n.inputs) {
        if (in.index >= nodes_.size()) {
            throw ShapeError("node input " + std::to_string(in.index) + " does not exist");
        }
    }
    nodes_.push_back(std::move(n));
    evaluate(nodes_.size() - 1);
    return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(NodeId id) const {
    if (id.index >= nodes_.size()) {
        throw ShapeError("unknown node id " + std::to_string(id.index));
    }
    return nodes_[id.index];
}

void Tape::shape_fail(std::size_t index, const std::string& what) const {
    throw ShapeError("node " + std::to_string(index) + " (" +
                     std::string(to_string(nodes_[index].kind)) + "): " + what);
}

NodeId Tape::constant(Matrix value) {
    return append(Node{OpKind::constant, {}, 0, 0, std::move(value)});
}

NodeId Tape::parameter(Matrix value) {
    return append(Node{OpKind::parameter, {}, 0, 0, std::move(value)});
}

NodeId Tape::matmul(NodeId a, NodeId b) { return append(Node{OpKind::matmul, {a, b}}); }
NodeId Tape::add_row_broadcast(NodeId a, NodeId bias) {
    return append(Node{OpKind::add_row_broadcast, {a, bias}});
}
NodeId Tape::tanh(NodeId a) { return append(Node{OpKind::tanh, {a}}); }
NodeId Tape::softmax_rows(NodeId a) { return append(Node{OpKind::softmax_rows, {a}}); }
NodeId Tape::exp(NodeId a) { return append(Node{OpKind::exp, {a}}); }
NodeId Tape::log(NodeId a) { return append(Node{OpKind::log, {a}}); }
NodeId Tape::power(NodeId a, double exponent) {
    return append(Node{OpKind::power, {a}, exponent});
}
NodeId Tape::scale(NodeId a, double factor) { return append(Node{OpKind::scale, {a}, factor}); }
NodeId Tape::add(NodeId a, NodeId b) { return append(Node{OpKind::add, {a, b}}); }
NodeId Tape::subtract(NodeId a, NodeId b) { return append(Node{OpKind::subtract, {a, b}}); }
NodeId Tape::multiply(NodeId a, NodeId b) { return append(Node{OpKind::multiply, {a, b}}); }
NodeId Tape::sum_all(NodeId a) { return append(Node{OpKind::sum_all, {a}}); }
NodeId Tape::sum_rows(NodeId a) { return append(Node{OpKind::sum_rows, {a}}); }
NodeId Tape::mean_all(NodeId a) { return append(Node{OpKind::mean_all, {a}}); }
NodeId Tape::column_slice(NodeId a, std::size_t offset, std::size_t width) {
    return append(Node{OpKind::column_slice, {a}, static_cast<double>(offset),
                       static_cast<double>(width)});
}
NodeId Tape::column_concat(std::span<const NodeId> parts) {
    return append(Node{OpKind::column_concat, {parts.begin(), parts.end()}});
}
NodeId Tape::square(NodeId a) { return append(Node{OpKind::square, {a}}); }
NodeId Tape::negate(NodeId a) { return append(Node{OpKind::negate, {a}}); }
NodeId Tape::clamp(NodeId a, double lo, double hi) {
    if (!(lo <= hi)) {
        throw ShapeError("clamp bounds out of order");
    }
    return append(Node{OpKind::clamp, {a}, lo, hi});
}

void Tape::evaluate(std::size_t index) {
    Node& n = nodes_[index];
    auto in = [&](std::size_t k) -> const Matrix& { return nodes_[n.inputs[k].index].value; };
    auto same_shape = [&] {
        if (!in(0).same_shape(in(1))) {
            shape_fail(index, in(0).shape_string() + " vs " + in(1).shape_string());
        }
    };

    switch (n.kind) {
    case OpKind::constant:
    case OpKind::parameter:
        break;
    case OpKind::matmul:
        if (in(0).cols() != in(1).rows()) {
            shape_fail(index, in(0).shape_string() + " * " + in(1).shape_string());
        }
        n.value = rtvae::matmul(in(0), in(1));
        break;
    case OpKind::add_row_broadcast:
        if (in(1).rows() != 1 || in(1).cols() != in(0).cols()) {
            shape_fail(index, "bias " + in(1).shape_string() + " for " + in(0).shape_string());
        }
        n.value = rtvae::add_row_broadcast(in(0), in(1));
        break;
    case OpKind::tanh:
        n.value = rtvae::tanh(in(0));
        break;
    case OpKind::softmax_rows:
        if (in(0).cols() == 0) {
            shape_fail(index, "softmax over zero columns");
        }
        n.value = rtvae::softmax_rows(in(0));
        break;
    case OpKind::exp:
        n.value = map(in(0), [](double v) { return std::exp(v); });
        break;
    case OpKind::log:
        n.value = map(in(0), [](double v) { return std::log(std::max(v, kProbabilityFloor)); });
        break;
    case OpKind::power: {
        const double p = n.arg0;
        n.value = map(in(0), [p](double v) { return std::pow(std::max(v, kProbabilityFloor), p); });
        break;
    }
    case OpKind::scale: {
        const double s = n.arg0;
        n.value = map(in(0), [s](double v) { return s * v; });
        break;
    }
    case OpKind::add:
        same_shape();
        n.value = zip(in(0), in(1), [](double a, double b) { return a + b; });
        break;
    case OpKind::subtract:
        same_shape();
        n.value = zip(in(0), in(1), [](double a, double b) { return a - b; });
        break;
    case OpKind::multiply:
        same_shape();
        n.value = zip(in(0), in(1), [](double a, double b) { return a * b; });
        break;
    case OpKind::sum_all: {
        double acc = 0.0;
        for (double v : in(0).values()) {
            acc += v;
        }
        n.value = Matrix::scalar(acc);
        break;
    }
    case OpKind::sum_rows: {
        const Matrix& a = in(0);
        n.value = Matrix(a.rows(), 1);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            double acc = 0.0;
            for (double v : a.row(i)) {
                acc += v;
            }
            n.value(i, 0) = acc;
        }
        break;
    }
    case OpKind::mean_all: {
        const Matrix& a = in(0);
        if (a.empty()) {
            shape_fail(index, "mean of empty matrix");
        }
        double acc = 0.0;
        for (double v : a.values()) {
            acc += v;
        }
        n.value = Matrix::scalar(acc / static_cast<double>(a.size()));
        break;
    }
    case OpKind::column_slice: {
        const auto offset = static_cast<std::size_t>(n.arg0);
        const auto width = static_cast<std::size_t>(n.arg1);
        if (offset + width > in(0).cols()) {
            shape_fail(index, "slice out of range for " + in(0).shape_string());
        }
        n.value = rtvae::column_slice(in(0), offset, width);
        break;
    }
    case OpKind::column_concat: {
        if (n.inputs.empty()) {
            shape_fail(index, "concat of zero parts");
        }
        const std::size_t rows = in(0).rows();
        std::size_t cols = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            if (in(k).rows() != rows) {
                shape_fail(index, "row count mismatch in concat");
            }
            cols += in(k).cols();
        }
        n.value = Matrix(rows, cols);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            const Matrix& part = in(k);
            for (std::size_t i = 0; i < rows; ++i) {
                std::copy(part.row(i).begin(), part.row(i).end(),
                          n.value.row(i).begin() + static_cast<std::ptrdiff_t>(offset));
            }
            offset += part.cols();
        }
        break;
    }
    case OpKind::square:
        n.value = map(in(0), [](double v) { return v * v; });
        break;
    case OpKind::negate:
        n.value = map(in(0), [](double v) { return -v; });
        break;
    case OpKind::clamp: {
        const double lo = n.arg0;
        const double hi = n.arg1;
        n.value = map(in(0), [lo, hi](double v) { return std::clamp(v, lo, hi); });
        break;
    }
    }

    if (checked_ && !n.value.all_finite()) {
        throw NumericError("non-finite value at node " + std::to_string(index) + " (" +
                           std::string(to_string(n.kind)) + ")");
    }
}

const Matrix& Tape::forward(const Bindings& bindings) {
    if (nodes_.empty()) {
        throw ShapeError("forward() on empty tape");
    }
    for (const auto& [id, value] : bindings) {
        if (id.index >= nodes_.size()) {
            throw ShapeError("binding for unknown node " + std::to_string(id.index));
        }
        Node& n = nodes_[id.index];
        if (n.kind != OpKind::constant && n.kind != OpKind::parameter) {
            throw ShapeError("binding targets non-leaf node " + std::to_string(id.index));
        }
        n.value = value;
        if (checked_ && !n.value.all_finite()) {
            throw NumericError("non-finite binding for node " + std::to_string(id.index));
        }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        evaluate(i);
    }
    return nodes_.back().value;
}

void Tape::propagate(std::size_t index) {
    Node& n = nodes_[index];
    const Matrix& g = n.grad;
    const Matrix& y = n.value;
    auto in = [&](std::size_t k) -> Node& { return nodes_[n.inputs[k].index]; };

    switch (n.kind) {
    case OpKind::constant:
    case OpKind::parameter:
        break;
    case OpKind::matmul: {
        Node& a = in(0);
        Node& b = in(1);
        const Matrix da = matmul_nt(g, b.value);
        const Matrix db = matmul_tn(a.value, g);
        accumulate(a.grad, [&](std::size_t i) { return da.values()[i]; });
        accumulate(b.grad, [&](std::size_t i) { return db.values()[i]; });
        break;
    }
    case OpKind::add_row_broadcast: {
        accumulate(in(0).grad, [&](std::size_t i) { return g.values()[i]; });
        const Matrix db = column_sums(g);
        accumulate(in(1).grad, [&](std::size_t i) { return db.values()[i]; });
        break;
    }
    case OpKind::tanh:
        accumulate(in(0).grad, [&](std::size_t i) {
            const double t = y.values()[i];
            return g.values()[i] * (1.0 - t * t);
        });
        break;
    case OpKind::softmax_rows: {
        Matrix& da = in(0).grad;
        for (std::size_t r = 0; r < y.rows(); ++r) {
            auto yr = y.row(r);
            auto gr = g.row(r);
            double dot = 0.0;
            for (std::size_t c = 0; c < yr.size(); ++c) {
                dot += gr[c] * yr[c];
            }
            auto out = da.row(r);
            for (std::size_t c = 0; c < yr.size(); ++c) {
                out[c] += yr[c] * (gr[c] - dot);
            }
        }
        break;
    }
    case OpKind::exp:
        accumulate(in(0).grad, [&](std::size_t i) { return g.values()[i] * y.values()[i]; });
        break;
    case OpKind::log: {
        const Matrix& x = in(0).value;
        accumulate(in(0).grad, [&](std::size_t i) {
            const double v = x.values()[i];
            return v > kProbabilityFloor ? g.values()[i] / v : 0.0;
        });
        break;
    }
    case OpKind::power: {
        const Matrix& x = in(0).value;
        const double p = n.arg0;
        accumulate(in(0).grad, [&](std::size_t i) {
            const double v = x.values()[i];
            return v > kProbabilityFloor ? g.values()[i] * p * std::pow(v, p - 1.0) : 0.0;
        });
        break;
    }
    case OpKind::scale: {
        const double s = n.arg0;
        accumulate(in(0).grad, [&](std::size_t i) { return s * g.values()[i]; });
        break;
    }
    case OpKind::add:
        accumulate(in(0).grad, [&](std::size_t i) { return g.values()[i]; });
        accumulate(in(1).grad, [&](std::size_t i) { return g.values()[i]; });
        break;
    case OpKind::subtract:
        accumulate(in(0).grad, [&](std::size_t i) { return g.values()[i]; });
        accumulate(in(1).grad, [&](std::size_t i) { return -g.values()[i]; });
        break;
    case OpKind::multiply: {
        const Matrix& a = in(0).value;
        const Matrix& b = in(1).value;
        accumulate(in(0).grad, [&](std::size_t i) { return g.values()[i] * b.values()[i]; });
        accumulate(in(1).grad, [&](std::size_t i) { return g.values()[i] * a.values()[i]; });
        break;
    }
    case OpKind::sum_all: {
        const double s = g.item();
        accumulate(in(0).grad, [&](std::size_t) { return s; });
        break;
    }
    case OpKind::sum_rows: {
        Matrix& da = in(0).grad;
        for (std::size_t r = 0; r < da.rows(); ++r) {
            const double s = g(r, 0);
            for (double& v : da.row(r)) {
                v += s;
            }
        }
        break;
    }
    case OpKind::mean_all: {
        Matrix& da = in(0).grad;
        const double s = g.item() / static_cast<double>(da.size());
        accumulate(da, [&](std::size_t) { return s; });
        break;
    }
    case OpKind::column_slice: {
        Matrix& da = in(0).grad;
        const auto offset = static_cast<std::size_t>(n.arg0);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            auto dst = da.row(r);
            auto src = g.row(r);
            for (std::size_t c = 0; c < src.size(); ++c) {
                dst[offset + c] += src[c];
            }
        }
        break;
    }
    case OpKind::column_concat: {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            Matrix& da = in(k).grad;
            for (std::size_t r = 0; r < da.rows(); ++r) {
                auto dst = da.row(r);
                auto src = g.row(r);
                for (std::size_t c = 0; c < dst.size(); ++c) {
                    dst[c] += src[offset + c];
                }
            }
            offset += da.cols();
        }
        break;
    }
    case OpKind::square: {
        const Matrix& x = in(0).value;
        accumulate(in(0).grad,
                   [&](std::size_t i) { return 2.0 * x.values()[i] * g.values()[i]; });
        break;
    }
    case OpKind::negate:
        accumulate(in(0).grad, [&](std::size_t i) { return -g.values()[i]; });
        break;
    case OpKind::clamp: {
        const Matrix& x = in(0).value;
        const double lo = n.arg0;
        const double hi = n.arg1;
        accumulate(in(0).grad, [&](std::size_t i) {
            const double v = x.values()[i];
            return (v >= lo && v <= hi) ? g.values()[i] : 0.0;
        });
        break;
    }
    }
}

std::vector<ParameterGradient> Tape::backward(NodeId output) {
    const Node& out = node(output);
    if (out.value.rows() != 1 || out.value.cols() != 1) {
        throw ShapeError("backward() requires a 1x1 output, node " +
                         std::to_string(output.index) + " is " + out.value.shape_string());
    }
    for (std::size_t i = 0; i <= output.index; ++i) {
        nodes_[i].grad = Matrix(nodes_[i].value.rows(), nodes_[i].value.cols());
    }
    for (std::size_t i = output.index + 1; i < nodes_.size(); ++i) {
        nodes_[i].grad = Matrix();
    }
    nodes_[output.index].grad(0, 0) = 1.0;
    for (std::size_t i = output.index + 1; i-- > 0;) {
        propagate(i);
    }

    std::vector<ParameterGradient> grads;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind != OpKind::parameter) {
            continue;
        }
        // Parameters created after the output do not influence it.
        Matrix g = i <= output.index
                       ? nodes_[i].grad
                       : Matrix(nodes_[i].value.rows(), nodes_[i].value.cols());
        grads.push_back({NodeId{static_cast<std::uint32_t>(i)}, std::move(g)});
    }
    return grads;
}

std::vector<ParameterGradient> Tape::backward() { return backward(last()); }

const Matrix& Tape::value(NodeId id) const { return node(id).value; }
const Matrix& Tape::gradient(NodeId id) const { return node(id).grad; }
OpKind Tape::kind(NodeId id) const { return node(id).kind; }

NodeId Tape::last() const {
    if (nodes_.empty()) {
        throw ShapeError("empty tape has no last node");
    }
    return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId reparameterize(Tape& tape, NodeId mu, NodeId logvar, NodeId noise) {
    if (!tape.value(mu).same_shape(tape.value(logvar)) ||
        !tape.value(mu).same_shape(tape.value(noise))) {
        throw ShapeError("reparameterize: mu " + tape.value(mu).shape_string() + ", logvar " +
                         tape.value(logvar).shape_string() + ", noise " +
                         tape.value(noise).shape_string());
    }
    const NodeId sigma = tape.exp(tape.scale(logvar, 0.5));
    return tape.add(mu, tape.multiply(sigma, noise));
}

} // namespace rtvae
