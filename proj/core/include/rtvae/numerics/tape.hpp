#pragma once

#include "rtvae/numerics/matrix.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rtvae {

/// Floor applied to the base of `log` and `power` nodes.
inline constexpr double kProbabilityFloor = 1e-7;

/// Index of a node on a Tape. Ids are dense and topologically ordered.
struct NodeId {
    std::uint32_t index = 0;
    friend auto operator<=>(NodeId, NodeId) = default;
};

enum class OpKind : std::uint8_t {
    constant,
    parameter,
    matmul,
    add_row_broadcast,
    tanh,
    softmax_rows,
    exp,
    log,
    power,
    scale,
    add,
    subtract,
    multiply,
    sum_all,
    sum_rows,
    mean_all,
    column_slice,
    column_concat,
    square,
    negate,
    clamp,
};

std::string_view to_string(OpKind kind) noexcept;

struct ParameterGradient {
    NodeId node;
    Matrix gradient;
};

using Bindings = std::vector<std::pair<NodeId, Matrix>>;

/// Reverse-mode differentiation tape over dense matrices.
///
/// Nodes are evaluated eagerly as they are appended, so `value()` is
/// available immediately. `forward()` rebinds leaves and re-evaluates the
/// whole graph in id order; `backward()` seeds a 1x1 output with 1 and
/// propagates adjoints in reverse id order.
///
/// `sum_rows` reduces each row to a single value (BxC -> Bx1). `log` and
/// `power` floor their input at kProbabilityFloor; the floored region has zero
/// derivative, as has the outside of a `clamp` interval.
///
/// Not thread-safe.
class Tape {
public:
    /// In checked mode every evaluated node is tested for NaN/Inf.
    explicit Tape(bool checked = false) : checked_(checked) {}

    NodeId constant(Matrix value);
    NodeId parameter(Matrix value);

    NodeId matmul(NodeId a, NodeId b);
    NodeId add_row_broadcast(NodeId a, NodeId bias);
    NodeId tanh(NodeId a);
    NodeId softmax_rows(NodeId a);
    NodeId exp(NodeId a);
    NodeId log(NodeId a);
    NodeId power(NodeId a, double exponent);
    NodeId scale(NodeId a, double factor);
    NodeId add(NodeId a, NodeId b);
    NodeId subtract(NodeId a, NodeId b);
    NodeId multiply(NodeId a, NodeId b);
    NodeId sum_all(NodeId a);
    NodeId sum_rows(NodeId a);
    NodeId mean_all(NodeId a);
    NodeId column_slice(NodeId a, std::size_t offset, std::size_t width);
    NodeId column_concat(std::span<const NodeId> parts);
    NodeId square(NodeId a);
    NodeId negate(NodeId a);
    NodeId clamp(NodeId a, double lo, double hi);

    /// Replaces the listed leaf values and re-evaluates every node.
    /// Returns the value of the last node.
    const Matrix& forward(const Bindings& bindings = {});

    /// Gradients of the 1x1 node `output` with respect to every parameter,
    /// in parameter creation order.
    std::vector<ParameterGradient> backward(NodeId output);
    /// Same, with the last node as the output.
    std::vector<ParameterGradient> backward();

    const Matrix& value(NodeId id) const;
    /// Adjoint of `id` from the most recent backward().
    const Matrix& gradient(NodeId id) const;
    OpKind kind(NodeId id) const;
    std::size_t size() const noexcept { return nodes_.size(); }
    NodeId last() const;

private:
    struct Node {
        Node(OpKind k, std::vector<NodeId> in, double a0 = 0.0, double a1 = 0.0,
             Matrix v = {})
            : kind(k), inputs(std::move(in)), arg0(a0), arg1(a1), value(std::move(v)) {}

        OpKind kind;
        std::vector<NodeId> inputs;
        double arg0 = 0.0;
        double arg1 = 0.0;
        Matrix value;
        Matrix grad;
    };

    NodeId append(Node node);
    void evaluate(std::size_t index);
    void propagate(std::size_t index);
    const Node& node(NodeId id) const;
    [[noreturn]] void shape_fail(std::size_t index, const std::string& what) const;

    std::vector<Node> nodes_;
    bool checked_;
};

/// z = mu + exp(logvar / 2) * noise, with `noise` a constant of standard
/// normal draws supplied by the caller.
NodeId reparameterize(Tape& tape, NodeId mu, NodeId logvar, NodeId noise);

} // namespace rtvae
