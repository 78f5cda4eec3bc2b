#include "dem/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace dem::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Constant: return "constant";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Scale: return "scale";
    case Op::Power: return "power";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::MatMul: return "matmul";
    case Op::MatVec: return "matvec";
    case Op::Transpose: return "transpose";
    case Op::Trace: return "trace";
    case Op::Det3: return "det3";
    case Op::Inv3: return "inv3";
    case Op::Dot: return "dot";
    case Op::Sum: return "sum";
    case Op::Relu: return "relu";
    case Op::Tanh: return "tanh";
    case Op::Square: return "square";
    case Op::Sqrt: return "sqrt";
    case Op::RowScale: return "rowscale";
    case Op::ReluGrad: return "relu_grad";
    case Op::Eye3: return "eye3";
  }
  return "?";
}

namespace {

[[noreturn]] void shape_fail(Op op, const std::string& detail) {
  throw ShapeError(std::string(op_name(op)) + ": " + detail);
}

std::string dims(int r, int c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

NodeId Tape::push(Op op, NodeId a, NodeId b, int rows, int cols, double aux) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.rows = rows;
  n.cols = cols;
  n.aux = aux;
  n.off = values_.size();
  const std::size_t sz = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  values_.resize(values_.size() + sz, 0.0);
  adjoints_.resize(adjoints_.size() + sz, 0.0);
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::leaf(const Tensor& value) {
  NodeId id = push(Op::Leaf, kNoNode, kNoNode, value.rows, value.cols, 0.0);
  std::copy(value.data.begin(), value.data.end(), val(id));
  params_.push_back(id);
  return id;
}

NodeId Tape::constant(const Tensor& value) {
  NodeId id = push(Op::Constant, kNoNode, kNoNode, value.rows, value.cols, 0.0);
  std::copy(value.data.begin(), value.data.end(), val(id));
  return id;
}

NodeId Tape::record(Op op, NodeId a, NodeId b, double aux) {
  const Node& na = nodes_.at(static_cast<std::size_t>(a));
  const int ar = na.rows, ac = na.cols;
  int rr = 0, rc = 0;

  auto need_b = [&]() -> const Node& {
    if (b == kNoNode) shape_fail(op, "missing second input");
    return nodes_.at(static_cast<std::size_t>(b));
  };

  switch (op) {
    case Op::Leaf:
    case Op::Constant:
      shape_fail(op, "not recordable");
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const Node& nb = need_b();
      if (nb.rows != ar || nb.cols != ac)
        shape_fail(op, "shape mismatch " + dims(ar, ac) + " vs " + dims(nb.rows, nb.cols));
      rr = ar;
      rc = ac;
      break;
    }
    case Op::Scale:
    case Op::Power:
    case Op::Exp:
    case Op::Ln:
    case Op::Relu:
    case Op::Tanh:
    case Op::Square:
    case Op::Sqrt:
    case Op::ReluGrad:
      rr = ar;
      rc = ac;
      break;
    case Op::MatMul: {
      const Node& nb = need_b();
      if (ac != nb.rows)
        shape_fail(op, "inner dimensions " + dims(ar, ac) + " vs " + dims(nb.rows, nb.cols));
      rr = ar;
      rc = nb.cols;
      break;
    }
    case Op::MatVec: {
      const Node& nb = need_b();
      if (nb.cols != 1 || ac != nb.rows)
        shape_fail(op, "expected " + dims(ar, ac) + " times " + dims(ac, 1) + ", got " +
                           dims(nb.rows, nb.cols));
      rr = ar;
      rc = 1;
      break;
    }
    case Op::Transpose:
      rr = ac;
      rc = ar;
      break;
    case Op::Trace:
      if (ar != ac) shape_fail(op, "non-square input " + dims(ar, ac));
      rr = rc = 1;
      break;
    case Op::Det3:
      if (ar != 3 || ac != 3) shape_fail(op, "requires 3x3, got " + dims(ar, ac));
      rr = rc = 1;
      break;
    case Op::Inv3:
      if (ar != 3 || ac != 3) shape_fail(op, "requires 3x3, got " + dims(ar, ac));
      rr = rc = 3;
      break;
    case Op::Dot: {
      const Node& nb = need_b();
      if (nb.rows != ar || nb.cols != ac)
        shape_fail(op, "shape mismatch " + dims(ar, ac) + " vs " + dims(nb.rows, nb.cols));
      rr = rc = 1;
      break;
    }
    case Op::Sum:
      rr = rc = 1;
      break;
    case Op::RowScale: {
      const Node& nb = need_b();
      if (nb.cols != 1 || nb.rows != ar)
        shape_fail(op, "rows " + dims(ar, ac) + " vs vector " + dims(nb.rows, nb.cols));
      rr = ar;
      rc = ac;
      break;
    }
    case Op::Eye3:
      if (ar != 1 || ac != 1) shape_fail(op, "requires scalar, got " + dims(ar, ac));
      rr = rc = 3;
      break;
  }

  NodeId id = push(op, a, b, rr, rc, aux);
  forward_eval(id);
  return id;
}

void Tape::forward_eval(NodeId id) {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  double* y = val(id);
  const double* xa = n.a == kNoNode ? nullptr : val(n.a);
  const double* xb = n.b == kNoNode ? nullptr : val(n.b);
  const Node* na = n.a == kNoNode ? nullptr : &nodes_[static_cast<std::size_t>(n.a)];
  const Node* nb = n.b == kNoNode ? nullptr : &nodes_[static_cast<std::size_t>(n.b)];
  const int sz = n.rows * n.cols;

  switch (n.op) {
    case Op::Leaf:
    case Op::Constant:
      break;
    case Op::Add:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] + xb[i];
      break;
    case Op::Sub:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] - xb[i];
      break;
    case Op::Mul:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] * xb[i];
      break;
    case Op::Div:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] / xb[i];
      break;
    case Op::Scale:
      for (int i = 0; i < sz; ++i) y[i] = n.aux * xa[i];
      break;
    case Op::Power:
      for (int i = 0; i < sz; ++i) y[i] = std::pow(xa[i], n.aux);
      break;
    case Op::Exp:
      for (int i = 0; i < sz; ++i) y[i] = std::exp(xa[i]);
      break;
    case Op::Ln:
      for (int i = 0; i < sz; ++i) y[i] = std::log(xa[i]);
      break;
    case Op::MatMul: {
      const int m = na->rows, k = na->cols, p = nb->cols;
      for (int i = 0; i < m * p; ++i) y[i] = 0.0;
      for (int i = 0; i < m; ++i)
        for (int kk = 0; kk < k; ++kk) {
          const double aik = xa[i * k + kk];
          const double* brow = xb + kk * p;
          double* yrow = y + i * p;
          for (int j = 0; j < p; ++j) yrow[j] += aik * brow[j];
        }
      break;
    }
    case Op::MatVec: {
      const int m = na->rows, k = na->cols;
      for (int i = 0; i < m; ++i) {
        const double* arow = xa + i * k;
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += arow[j] * xb[j];
        y[i] = s;
      }
      break;
    }
    case Op::Transpose: {
      const int m = na->rows, c = na->cols;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < c; ++j) y[j * m + i] = xa[i * c + j];
      break;
    }
    case Op::Trace: {
      const int m = na->rows;
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += xa[i * m + i];
      y[0] = s;
      break;
    }
    case Op::Det3: {
      Mat3 a;
      std::memcpy(a.m.data(), xa, 9 * sizeof(double));
      y[0] = det(a);
      break;
    }
    case Op::Inv3: {
      Mat3 a;
      std::memcpy(a.m.data(), xa, 9 * sizeof(double));
      Mat3 inv = inverse(a);
      std::memcpy(y, inv.m.data(), 9 * sizeof(double));
      break;
    }
    case Op::Dot: {
      const int m = na->rows * na->cols;
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += xa[i] * xb[i];
      y[0] = s;
      break;
    }
    case Op::Sum: {
      const int m = na->rows * na->cols;
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += xa[i];
      y[0] = s;
      break;
    }
    case Op::Relu:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] > 0.0 ? xa[i] : 0.0;
      break;
    case Op::Tanh:
      for (int i = 0; i < sz; ++i) y[i] = std::tanh(xa[i]);
      break;
    case Op::Square:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] * xa[i];
      break;
    case Op::Sqrt:
      for (int i = 0; i < sz; ++i) y[i] = std::sqrt(xa[i]);
      break;
    case Op::RowScale: {
      const int m = na->rows, c = na->cols;
      for (int i = 0; i < m; ++i) {
        const double vi = xb[i];
        for (int j = 0; j < c; ++j) y[i * c + j] = vi * xa[i * c + j];
      }
      break;
    }
    case Op::ReluGrad:
      for (int i = 0; i < sz; ++i) y[i] = xa[i] > 0.0 ? 1.0 : 0.0;
      break;
    case Op::Eye3:
      for (int i = 0; i < 9; ++i) y[i] = 0.0;
      y[0] = y[4] = y[8] = xa[0];
      break;
  }
}

void Tape::backward_eval(NodeId id) {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.op == Op::Leaf || n.op == Op::Constant) return;

  const double* g = adjoints_.data() + n.off;
  const int sz = n.rows * n.cols;
  bool any = false;
  for (int i = 0; i < sz; ++i)
    if (g[i] != 0.0) {
      any = true;
      break;
    }
  if (!any) return;

  const double* y = val(id);
  const double* xa = n.a == kNoNode ? nullptr : val(n.a);
  const double* xb = n.b == kNoNode ? nullptr : val(n.b);
  double* ga = n.a == kNoNode ? nullptr : adj(n.a);
  double* gb = n.b == kNoNode ? nullptr : adj(n.b);
  const Node* na = n.a == kNoNode ? nullptr : &nodes_[static_cast<std::size_t>(n.a)];
  const Node* nb = n.b == kNoNode ? nullptr : &nodes_[static_cast<std::size_t>(n.b)];

  switch (n.op) {
    case Op::Leaf:
    case Op::Constant:
      break;
    case Op::Add:
      for (int i = 0; i < sz; ++i) {
        ga[i] += g[i];
        gb[i] += g[i];
      }
      break;
    case Op::Sub:
      for (int i = 0; i < sz; ++i) {
        ga[i] += g[i];
        gb[i] -= g[i];
      }
      break;
    case Op::Mul:
      for (int i = 0; i < sz; ++i) {
        ga[i] += g[i] * xb[i];
        gb[i] += g[i] * xa[i];
      }
      break;
    case Op::Div:
      for (int i = 0; i < sz; ++i) {
        ga[i] += g[i] / xb[i];
        gb[i] -= g[i] * xa[i] / (xb[i] * xb[i]);
      }
      break;
    case Op::Scale:
      for (int i = 0; i < sz; ++i) ga[i] += n.aux * g[i];
      break;
    case Op::Power:
      for (int i = 0; i < sz; ++i) ga[i] += g[i] * n.aux * std::pow(xa[i], n.aux - 1.0);
      break;
    case Op::Exp:
      for (int i = 0; i < sz; ++i) ga[i] += g[i] * y[i];
      break;
    case Op::Ln:
      for (int i = 0; i < sz; ++i) ga[i] += g[i] / xa[i];
      break;
    case Op::MatMul: {
      const int m = na->rows, k = na->cols, p = nb->cols;
      // dA += g * B^T ; dB += A^T * g
      for (int i = 0; i < m; ++i)
        for (int kk = 0; kk < k; ++kk) {
          const double* grow = g + i * p;
          const double* brow = xb + kk * p;
          double s = 0.0;
          for (int j = 0; j < p; ++j) s += grow[j] * brow[j];
          ga[i * k + kk] += s;
        }
      for (int i = 0; i < m; ++i)
        for (int kk = 0; kk < k; ++kk) {
          const double aik = xa[i * k + kk];
          const double* grow = g + i * p;
          double* gbrow = gb + kk * p;
          for (int j = 0; j < p; ++j) gbrow[j] += aik * grow[j];
        }
      break;
    }
    case Op::MatVec: {
      const int m = na->rows, k = na->cols;
      for (int i = 0; i < m; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const double* arow = xa + i * k;
        double* garow = ga + i * k;
        for (int j = 0; j < k; ++j) {
          garow[j] += gi * xb[j];
          gb[j] += gi * arow[j];
        }
      }
      break;
    }
    case Op::Transpose: {
      const int m = na->rows, c = na->cols;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < c; ++j) ga[i * c + j] += g[j * m + i];
      break;
    }
    case Op::Trace: {
      const int m = na->rows;
      for (int i = 0; i < m; ++i) ga[i * m + i] += g[0];
      break;
    }
    case Op::Det3: {
      Mat3 a;
      std::memcpy(a.m.data(), xa, 9 * sizeof(double));
      const Mat3 c = cofactor(a);
      for (int i = 0; i < 9; ++i) ga[i] += g[0] * c.m[i];
      break;
    }
    case Op::Inv3: {
      // dA = -Y^T * G * Y^T with Y = A^{-1}
      Mat3 yt;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) yt(i, j) = y[j * 3 + i];
      Mat3 gm;
      std::memcpy(gm.m.data(), g, 9 * sizeof(double));
      const Mat3 d = yt * gm * yt;
      for (int i = 0; i < 9; ++i) ga[i] -= d.m[i];
      break;
    }
    case Op::Dot: {
      const int m = na->rows * na->cols;
      const double g0 = g[0];
      for (int i = 0; i < m; ++i) {
        ga[i] += g0 * xb[i];
        gb[i] += g0 * xa[i];
      }
      break;
    }
    case Op::Sum: {
      const int m = na->rows * na->cols;
      for (int i = 0; i < m; ++i) ga[i] += g[0];
      break;
    }
    case Op::Relu:
      for (int i = 0; i < sz; ++i)
        if (xa[i] > 0.0) ga[i] += g[i];
      break;
    case Op::Tanh:
      for (int i = 0; i < sz; ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
      break;
    case Op::Square:
      for (int i = 0; i < sz; ++i) ga[i] += g[i] * 2.0 * xa[i];
      break;
    case Op::Sqrt:
      for (int i = 0; i < sz; ++i) ga[i] += g[i] * 0.5 / y[i];
      break;
    case Op::RowScale: {
      const int m = na->rows, c = na->cols;
      for (int i = 0; i < m; ++i) {
        const double vi = xb[i];
        const double* grow = g + i * c;
        const double* arow = xa + i * c;
        double* garow = ga + i * c;
        double s = 0.0;
        for (int j = 0; j < c; ++j) {
          garow[j] += vi * grow[j];
          s += grow[j] * arow[j];
        }
        gb[i] += s;
      }
      break;
    }
    case Op::ReluGrad:
      break;  // piecewise constant
    case Op::Eye3:
      ga[0] += g[0] + g[4] + g[8];
      break;
  }
}

std::span<const double> Tape::value(NodeId id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  return {values_.data() + n.off, static_cast<std::size_t>(n.rows * n.cols)};
}

std::span<const double> Tape::adjoint(NodeId id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  return {adjoints_.data() + n.off, static_cast<std::size_t>(n.rows * n.cols)};
}

double Tape::scalar_value(NodeId id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  if (n.rows != 1 || n.cols != 1) throw ShapeError("scalar_value: node is not scalar");
  return values_[n.off];
}

Tensor Tape::value_tensor(NodeId id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  Tensor t(n.rows, n.cols);
  std::copy(values_.begin() + static_cast<std::ptrdiff_t>(n.off),
            values_.begin() + static_cast<std::ptrdiff_t>(n.off) + t.size(), t.data.begin());
  return t;
}

Tensor Tape::adjoint_tensor(NodeId id) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(id));
  Tensor t(n.rows, n.cols);
  std::copy(adjoints_.begin() + static_cast<std::ptrdiff_t>(n.off),
            adjoints_.begin() + static_cast<std::ptrdiff_t>(n.off) + t.size(), t.data.begin());
  return t;
}

std::vector<double> Tape::backward(NodeId root) {
  const Node& r = nodes_.at(static_cast<std::size_t>(root));
  if (r.rows != 1 || r.cols != 1) throw ShapeError("backward: root is not scalar");
  zero_adjoints();
  backward_accumulate(root, 1.0, 0);
  return parameter_gradient();
}

void Tape::backward_accumulate(NodeId root, double seed, std::size_t from) {
  const Node& r = nodes_.at(static_cast<std::size_t>(root));
  if (r.rows != 1 || r.cols != 1) throw ShapeError("backward: root is not scalar");
  adjoints_[r.off] += seed;
  for (std::size_t i = static_cast<std::size_t>(root) + 1; i-- > from;) {
    backward_eval(static_cast<NodeId>(i));
  }
}

void Tape::zero_adjoints() { std::fill(adjoints_.begin(), adjoints_.end(), 0.0); }

std::vector<double> Tape::parameter_gradient() const {
  std::vector<double> g;
  g.reserve(parameter_size());
  for (NodeId id : params_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    const double* a = adjoints_.data() + n.off;
    g.insert(g.end(), a, a + n.rows * n.cols);
  }
  return g;
}

std::size_t Tape::parameter_size() const {
  std::size_t s = 0;
  for (NodeId id : params_) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    s += static_cast<std::size_t>(n.rows * n.cols);
  }
  return s;
}

void Tape::rewind(std::size_t checkpoint) {
  if (checkpoint >= nodes_.size()) return;
  const std::size_t off = nodes_[checkpoint].off;
  nodes_.resize(checkpoint);
  values_.resize(off);
  adjoints_.resize(off);
  while (!params_.empty() && static_cast<std::size_t>(params_.back()) >= checkpoint)
    params_.pop_back();
}

void Tape::clear() {
  nodes_.clear();
  values_.clear();
  adjoints_.clear();
  params_.clear();
}

}  // namespace dem::ad
