#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tdtrnn/tensor.h"

namespace tdtrnn {

enum class Activation { kTanh, kRelu };
enum class Elementwise { kAdd, kSub, kMul, kAbsDiff };

enum class OpKind {
  kInput,
  kParam,
  kMatVec,
  kConcat,
  kTanh,
  kRelu,
  kAdd,
  kSub,
  kMul,
  kAbsDiff,
  kScale,
  kSum,
  kSumSquares,
  kSoftmax,
  kKlDivergence,
};

const char* op_name(OpKind op);

// Handle to a node of one Graph. Only meaningful for the graph that made it.
class Var {
 public:
  std::size_t index() const { return index_; }

 private:
  friend class Graph;
  explicit Var(std::size_t index) : index_(index) {}
  std::size_t index_;
};

struct GraphOptions {
  // Negative control for gradient checking: the backward rule of this op
  // deliberately scales its input gradients by 1.5.
  std::optional<OpKind> corrupt_backward;
};

// Define-by-run tape. Nodes are appended in execution order, so the record is
// topologically sorted by construction; backward walks it in reverse.
// Parameters are bound by reference and receive accumulated gradients.
class Graph {
 public:
  Graph() = default;
  explicit Graph(GraphOptions options) : options_(options) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(Tensor value);
  // Binding the same tensor twice yields the same node.
  Var param(Tensor& tensor);

  Var matvec(Var m, Var x);
  Var concat(Var a, Var b);
  Var activate(Var x, Activation kind);
  Var tanh(Var x) { return activate(x, Activation::kTanh); }
  Var relu(Var x) { return activate(x, Activation::kRelu); }
  Var elementwise(Var a, Var b, Elementwise kind);
  Var add(Var a, Var b) { return elementwise(a, b, Elementwise::kAdd); }
  Var sub(Var a, Var b) { return elementwise(a, b, Elementwise::kSub); }
  Var mul(Var a, Var b) { return elementwise(a, b, Elementwise::kMul); }
  Var abs_diff(Var a, Var b) {
    return elementwise(a, b, Elementwise::kAbsDiff);
  }
  Var scale(Var x, double factor);
  Var sum(Var x);
  Var sum_squares(Var x);
  Var softmax(Var x);
  // KL(target || p_hat). The target is a constant probability vector.
  Var kl_divergence(std::span<const double> target, Var p_hat);

  const Tensor& value(Var v) const;
  double scalar(Var v) const;
  // Gradient of the loss with respect to any node, available after backward.
  std::span<const double> grad(Var v) const;

  void backward(Var loss);
  bool backward_done() const { return backward_done_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Node {
    OpKind op = OpKind::kInput;
    std::size_t a = kNone;
    std::size_t b = kNone;
    Tensor value;
    Tensor* param = nullptr;
    double factor = 0.0;
    std::vector<double> target;
    bool needs_grad = false;
    std::vector<double> grad;
  };

  static Node make_node(OpKind op, std::size_t a = kNone, std::size_t b = kNone) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    return n;
  }
  const Tensor& node_value(std::size_t i) const;
  Var push(Node node);
  void check_var(Var v) const;
  void propagate(std::size_t i);
  std::vector<double>& grad_buffer(std::size_t i);

  GraphOptions options_;
  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, std::size_t> bound_params_;
  bool backward_done_ = false;
};

}  // namespace tdtrnn
