#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dem/tensor.hpp"

namespace dem::ad {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class Op : std::uint8_t {
  Leaf,
  Constant,
  Add,
  Sub,
  Mul,       // elementwise
  Div,       // elementwise
  Scale,     // aux * x
  Power,     // x^aux, elementwise
  Exp,
  Ln,
  MatMul,    // (m x k) * (k x n)
  MatVec,    // (m x k) * (k x 1)
  Transpose,
  Trace,     // square matrix
  Det3,      // 3x3 only
  Inv3,      // 3x3 only
  Dot,       // sum of elementwise product, same shapes
  Sum,       // sum of all entries
  Relu,
  Tanh,
  Square,
  Sqrt,
  RowScale,  // M_ik * v_i  (matrix rows scaled by vector entries)
  ReluGrad,  // 1 where x > 0 else 0; derivative defined as 0
  Eye3,      // scalar * identity(3)
};

const char* op_name(Op op);

struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Node {
  Op op = Op::Leaf;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  std::int32_t rows = 0;
  std::int32_t cols = 0;
  std::size_t off = 0;  // offset into the value/adjoint arenas
  double aux = 0.0;     // scale factor or power exponent
};

/// Append-only reverse-mode tape over shaped dense values. Values and
/// adjoints live in contiguous arenas indexed by node offset; checkpoint()
/// and rewind() let a caller reuse the region above a fixed set of leaves.
class Tape {
 public:
  // --- construction of leaves -------------------------------------------
  NodeId leaf(const Tensor& value);          // registered parameter leaf
  NodeId leaf(double value) { return leaf(Tensor::scalar(value)); }
  NodeId constant(const Tensor& value);      // not part of the gradient
  NodeId constant(double value) { return constant(Tensor::scalar(value)); }

  // --- recording ---------------------------------------------------------
  /// Records one primitive, evaluating it eagerly. Shape mismatches throw
  /// ShapeError naming the primitive.
  NodeId record(Op op, NodeId a, NodeId b = kNoNode, double aux = 0.0);

  NodeId add(NodeId a, NodeId b) { return record(Op::Add, a, b); }
  NodeId sub(NodeId a, NodeId b) { return record(Op::Sub, a, b); }
  NodeId mul(NodeId a, NodeId b) { return record(Op::Mul, a, b); }
  NodeId div(NodeId a, NodeId b) { return record(Op::Div, a, b); }
  NodeId scale(NodeId a, double c) { return record(Op::Scale, a, kNoNode, c); }
  NodeId power(NodeId a, double p) { return record(Op::Power, a, kNoNode, p); }
  NodeId exp(NodeId a) { return record(Op::Exp, a); }
  NodeId ln(NodeId a) { return record(Op::Ln, a); }
  NodeId matmul(NodeId a, NodeId b) { return record(Op::MatMul, a, b); }
  NodeId matvec(NodeId a, NodeId b) { return record(Op::MatVec, a, b); }
  NodeId transpose(NodeId a) { return record(Op::Transpose, a); }
  NodeId trace(NodeId a) { return record(Op::Trace, a); }
  NodeId det3(NodeId a) { return record(Op::Det3, a); }
  NodeId inv3(NodeId a) { return record(Op::Inv3, a); }
  NodeId dot(NodeId a, NodeId b) { return record(Op::Dot, a, b); }
  NodeId sum(NodeId a) { return record(Op::Sum, a); }
  NodeId relu(NodeId a) { return record(Op::Relu, a); }
  NodeId tanh(NodeId a) { return record(Op::Tanh, a); }
  NodeId square(NodeId a) { return record(Op::Square, a); }
  NodeId sqrt(NodeId a) { return record(Op::Sqrt, a); }
  NodeId rowscale(NodeId m, NodeId v) { return record(Op::RowScale, m, v); }
  NodeId relu_grad(NodeId a) { return record(Op::ReluGrad, a); }
  NodeId eye3(NodeId s) { return record(Op::Eye3, s); }

  // --- access ------------------------------------------------------------
  std::span<const double> value(NodeId id) const;
  std::span<const double> adjoint(NodeId id) const;
  double scalar_value(NodeId id) const;
  Tensor value_tensor(NodeId id) const;
  Tensor adjoint_tensor(NodeId id) const;
  int rows(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].rows; }
  int cols(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].cols; }
  std::size_t size() const { return nodes_.size(); }

  // --- backward ----------------------------------------------------------
  /// Zeroes all adjoints, seeds the scalar root with 1 and propagates the
  /// chain rule down the tape. Throws if the root is not a scalar. Returns
  /// the gradient with respect to the registered parameter leaves, in
  /// registration order.
  std::vector<double> backward(NodeId root);

  /// Propagates from `root` (seeded with `seed`, without zeroing anything)
  /// down to node index `from`. Nodes below `from` must be leaves or
  /// constants; their adjoints accumulate across calls.
  void backward_accumulate(NodeId root, double seed, std::size_t from);

  void zero_adjoints();
  /// Gathers adjoints of the registered parameter leaves into a flat vector.
  std::vector<double> parameter_gradient() const;
  std::size_t parameter_size() const;

  // --- arena management ---------------------------------------------------
  std::size_t checkpoint() const { return nodes_.size(); }
  void rewind(std::size_t checkpoint);
  void clear();

 private:
  NodeId push(Op op, NodeId a, NodeId b, int rows, int cols, double aux);
  double* val(NodeId id) { return values_.data() + nodes_[static_cast<std::size_t>(id)].off; }
  const double* val(NodeId id) const {
    return values_.data() + nodes_[static_cast<std::size_t>(id)].off;
  }
  double* adj(NodeId id) { return adjoints_.data() + nodes_[static_cast<std::size_t>(id)].off; }
  int node_size(NodeId id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    return n.rows * n.cols;
  }
  void forward_eval(NodeId id);
  void backward_eval(NodeId id);

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<NodeId> params_;
};

}  // namespace dem::ad
