#include "tdtrnn/graph.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdtrnn/error.h"

namespace tdtrnn {

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::kInput: return "input";
    case OpKind::kParam: return "param";
    case OpKind::kMatVec: return "matvec";
    case OpKind::kConcat: return "concat";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kAbsDiff: return "abs_diff";
    case OpKind::kScale: return "scale";
    case OpKind::kSum: return "sum";
    case OpKind::kSumSquares: return "sum_squares";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kKlDivergence: return "kl_divergence";
  }
  return "?";
}

namespace {

void require_rank1(const Tensor& t, const char* op) {
  if (t.rank() != 1) {
    throw DimensionError(std::string(op) + " expects a rank-1 tensor, got " +
                         shape_string(t.shape()));
  }
}

}  // namespace

const Tensor& Graph::node_value(std::size_t i) const {
  const Node& n = nodes_[i];
  return n.param ? *n.param : n.value;
}

void Graph::check_var(Var v) const {
  if (v.index_ >= nodes_.size()) {
    throw StateError("variable does not belong to this graph");
  }
}

Var Graph::push(Node node) {
  if (backward_done_) throw StateError("graph already ran backward");
  if (node.a != kNone) node.needs_grad = nodes_[node.a].needs_grad;
  if (node.b != kNone) node.needs_grad |= nodes_[node.b].needs_grad;
  nodes_.push_back(std::move(node));
  return Var(nodes_.size() - 1);
}

Var Graph::input(Tensor value) {
  Node n = make_node(OpKind::kInput);
  n.value = std::move(value);
  return push(std::move(n));
}

Var Graph::param(Tensor& tensor) {
  if (auto it = bound_params_.find(&tensor); it != bound_params_.end()) {
    return Var(it->second);
  }
  Node n = make_node(OpKind::kParam);
  n.param = &tensor;
  n.needs_grad = tensor.requires_grad();
  Var v = push(std::move(n));
  bound_params_.emplace(&tensor, v.index_);
  return v;
}

Var Graph::matvec(Var m, Var x) {
  check_var(m);
  check_var(x);
  const Tensor& mt = node_value(m.index_);
  const Tensor& xt = node_value(x.index_);
  if (mt.rank() != 2 || xt.rank() != 1 || mt.cols() != xt.size()) {
    throw DimensionError("matvec shape mismatch: " + shape_string(mt.shape()) +
                         " * " + shape_string(xt.shape()));
  }
  const std::size_t rows = mt.rows();
  const std::size_t cols = mt.cols();
  std::vector<double> out(rows, 0.0);
  const auto mv = mt.values();
  const auto xv = xt.values();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = mv.data() + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * xv[j];
    out[i] = acc;
  }
  Node n = make_node(OpKind::kMatVec, m.index_, x.index_);
  n.value = Tensor::vector(std::move(out));
  return push(std::move(n));
}

Var Graph::concat(Var a, Var b) {
  check_var(a);
  check_var(b);
  const Tensor& at = node_value(a.index_);
  const Tensor& bt = node_value(b.index_);
  require_rank1(at, "concat");
  require_rank1(bt, "concat");
  std::vector<double> out(at.values().begin(), at.values().end());
  out.insert(out.end(), bt.values().begin(), bt.values().end());
  Node n = make_node(OpKind::kConcat, a.index_, b.index_);
  n.value = Tensor::vector(std::move(out));
  return push(std::move(n));
}

Var Graph::activate(Var x, Activation kind) {
  check_var(x);
  const Tensor& xt = node_value(x.index_);
  std::vector<double> out(xt.values().begin(), xt.values().end());
  if (kind == Activation::kTanh) {
    for (double& v : out) v = std::tanh(v);
  } else {
    for (double& v : out) v = v > 0.0 ? v : 0.0;
  }
  Node n = make_node(kind == Activation::kTanh ? OpKind::kTanh : OpKind::kRelu,
                     x.index_);
  n.value = Tensor(xt.shape(), std::move(out));
  return push(std::move(n));
}

Var Graph::elementwise(Var a, Var b, Elementwise kind) {
  check_var(a);
  check_var(b);
  const Tensor& at = node_value(a.index_);
  const Tensor& bt = node_value(b.index_);
  if (at.shape() != bt.shape()) {
    throw DimensionError("elementwise shape mismatch: " +
                         shape_string(at.shape()) + " vs " +
                         shape_string(bt.shape()));
  }
  const auto av = at.values();
  const auto bv = bt.values();
  std::vector<double> out(av.size());
  OpKind op = OpKind::kAdd;
  switch (kind) {
    case Elementwise::kAdd:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
      op = OpKind::kAdd;
      break;
    case Elementwise::kSub:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
      op = OpKind::kSub;
      break;
    case Elementwise::kMul:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
      op = OpKind::kMul;
      break;
    case Elementwise::kAbsDiff:
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::fabs(av[i] - bv[i]);
      }
      op = OpKind::kAbsDiff;
      break;
  }
  Node n = make_node(op, a.index_, b.index_);
  n.value = Tensor(at.shape(), std::move(out));
  return push(std::move(n));
}

Var Graph::scale(Var x, double factor) {
  check_var(x);
  const Tensor& xt = node_value(x.index_);
  std::vector<double> out(xt.values().begin(), xt.values().end());
  for (double& v : out) v *= factor;
  Node n = make_node(OpKind::kScale, x.index_);
  n.factor = factor;
  n.value = Tensor(xt.shape(), std::move(out));
  return push(std::move(n));
}

Var Graph::sum(Var x) {
  check_var(x);
  double acc = 0.0;
  for (double v : node_value(x.index_).values()) acc += v;
  Node n = make_node(OpKind::kSum, x.index_);
  n.value = Tensor::vector({acc});
  return push(std::move(n));
}

Var Graph::sum_squares(Var x) {
  check_var(x);
  double acc = 0.0;
  for (double v : node_value(x.index_).values()) acc += v * v;
  Node n = make_node(OpKind::kSumSquares, x.index_);
  n.value = Tensor::vector({acc});
  return push(std::move(n));
}

Var Graph::softmax(Var x) {
  check_var(x);
  const Tensor& xt = node_value(x.index_);
  require_rank1(xt, "softmax");
  if (xt.size() == 0) throw DimensionError("softmax of an empty vector");
  const auto xv = xt.values();
  const double peak = *std::max_element(xv.begin(), xv.end());
  std::vector<double> out(xv.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(xv[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  Node n = make_node(OpKind::kSoftmax, x.index_);
  n.value = Tensor::vector(std::move(out));
  return push(std::move(n));
}

Var Graph::kl_divergence(std::span<const double> target, Var p_hat) {
  check_var(p_hat);
  const Tensor& qt = node_value(p_hat.index_);
  require_rank1(qt, "kl_divergence");
  if (qt.size() != target.size()) {
    throw DimensionError("kl_divergence size mismatch: target [" +
                         std::to_string(target.size()) + "] vs p_hat " +
                         shape_string(qt.shape()));
  }
  const auto q = qt.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0)) {
      throw DomainError("kl_divergence: p_hat[" + std::to_string(i) +
                        "] = " + std::to_string(q[i]) + " is not positive");
    }
    if (target[i] > 0.0) acc += target[i] * std::log(target[i] / q[i]);
  }
  Node n = make_node(OpKind::kKlDivergence, p_hat.index_);
  n.target.assign(target.begin(), target.end());
  n.value = Tensor::vector({acc});
  return push(std::move(n));
}

const Tensor& Graph::value(Var v) const {
  check_var(v);
  return node_value(v.index_);
}

double Graph::scalar(Var v) const {
  const Tensor& t = value(v);
  if (t.size() != 1) {
    throw DimensionError("expected a scalar, got " + shape_string(t.shape()));
  }
  return t[0];
}

std::span<const double> Graph::grad(Var v) const {
  check_var(v);
  if (!backward_done_) throw StateError("backward has not run");
  const Node& n = nodes_[v.index_];
  if (n.grad.empty() && node_value(v.index_).size() != 0) {
    throw StateError("node does not receive a gradient");
  }
  return n.grad;
}

std::vector<double>& Graph::grad_buffer(std::size_t i) {
  Node& n = nodes_[i];
  if (n.grad.empty()) n.grad.assign(node_value(i).size(), 0.0);
  return n.grad;
}

void Graph::backward(Var loss) {
  check_var(loss);
  if (backward_done_) {
    throw StateError("backward called twice on the same graph");
  }
  const Tensor& lt = node_value(loss.index_);
  if (lt.rank() != 1 || lt.size() != 1) {
    throw DimensionError("backward needs a scalar loss, got " +
                         shape_string(lt.shape()));
  }
  backward_done_ = true;
  grad_buffer(loss.index_)[0] = 1.0;
  for (std::size_t i = loss.index_ + 1; i-- > 0;) {
    if (nodes_[i].grad.empty() || !nodes_[i].needs_grad) continue;
    propagate(i);
  }
  for (Node& n : nodes_) {
    if (n.op != OpKind::kParam || !n.param->requires_grad() || n.grad.empty()) {
      continue;
    }
    auto dst = n.param->ensure_grad();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += n.grad[k];
  }
}

void Graph::propagate(std::size_t i) {
  Node& n = nodes_[i];
  const bool want_a = n.a != kNone && nodes_[n.a].needs_grad;
  const bool want_b = n.b != kNone && nodes_[n.b].needs_grad;
  if (!want_a && !want_b) return;

  std::vector<double> g = n.grad;
  if (options_.corrupt_backward == n.op) {
    for (double& v : g) v *= 1.5;
  }
  const Tensor& y = n.value;

  switch (n.op) {
    case OpKind::kInput:
    case OpKind::kParam:
      return;
    case OpKind::kMatVec: {
      const Tensor& m = node_value(n.a);
      const Tensor& x = node_value(n.b);
      const std::size_t rows = m.rows();
      const std::size_t cols = m.cols();
      const auto mv = m.values();
      const auto xv = x.values();
      if (want_a) {
        auto& gm = grad_buffer(n.a);
        for (std::size_t r = 0; r < rows; ++r) {
          if (g[r] == 0.0) continue;
          double* row = gm.data() + r * cols;
          for (std::size_t c = 0; c < cols; ++c) row[c] += g[r] * xv[c];
        }
      }
      if (want_b) {
        auto& gx = grad_buffer(n.b);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* row = mv.data() + r * cols;
          for (std::size_t c = 0; c < cols; ++c) gx[c] += row[c] * g[r];
        }
      }
      return;
    }
    case OpKind::kConcat: {
      const std::size_t split = node_value(n.a).size();
      if (want_a) {
        auto& ga = grad_buffer(n.a);
        for (std::size_t k = 0; k < split; ++k) ga[k] += g[k];
      }
      if (want_b) {
        auto& gb = grad_buffer(n.b);
        for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += g[split + k];
      }
      return;
    }
    case OpKind::kTanh: {
      auto& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) {
        ga[k] += g[k] * (1.0 - y[k] * y[k]);
      }
      return;
    }
    case OpKind::kRelu: {
      const auto xv = node_value(n.a).values();
      auto& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) {
        if (xv[k] > 0.0) ga[k] += g[k];
      }
      return;
    }
    case OpKind::kAdd:
    case OpKind::kSub: {
      const double sign = n.op == OpKind::kSub ? -1.0 : 1.0;
      if (want_a) {
        auto& ga = grad_buffer(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
      }
      if (want_b) {
        auto& gb = grad_buffer(n.b);
        for (std::size_t k = 0; k < g.size(); ++k) gb[k] += sign * g[k];
      }
      return;
    }
    case OpKind::kMul: {
      const auto av = node_value(n.a).values();
      const auto bv = node_value(n.b).values();
      if (want_a) {
        auto& ga = grad_buffer(n.a);
        for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * bv[k];
      }
      if (want_b) {
        auto& gb = grad_buffer(n.b);
        for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * av[k];
      }
      return;
    }
    case OpKind::kAbsDiff: {
      const auto av = node_value(n.a).values();
      const auto bv = node_value(n.b).values();
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double d = av[k] - bv[k];
        const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        if (want_a) grad_buffer(n.a)[k] += g[k] * s;
        if (want_b) grad_buffer(n.b)[k] -= g[k] * s;
      }
      return;
    }
    case OpKind::kScale: {
      auto& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.factor;
      return;
    }
    case OpKind::kSum: {
      auto& ga = grad_buffer(n.a);
      for (double& v : ga) v += g[0];
      return;
    }
    case OpKind::kSumSquares: {
      const auto xv = node_value(n.a).values();
      auto& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += 2.0 * xv[k] * g[0];
      return;
    }
    case OpKind::kSoftmax: {
      double dot = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) dot += g[k] * y[k];
      auto& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += y[k] * (g[k] - dot);
      return;
    }
    case OpKind::kKlDivergence: {
      const auto q = node_value(n.a).values();
      auto& ga = grad_buffer(n.a);
      for (std::size_t k = 0; k < ga.size(); ++k) {
        if (n.target[k] > 0.0) ga[k] -= g[0] * n.target[k] / q[k];
      }
      return;
    }
  }
}

}  // namespace tdtrnn
