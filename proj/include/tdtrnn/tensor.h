#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tdtrnn {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

// Dense rank-1 or rank-2 array of doubles, row-major. A tensor that
// requires_grad is a trainable parameter; its gradient buffer is filled by
// Graph::backward and consumed by the optimizer.
class Tensor {
 public:
  Tensor() : shape_{0} {}
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  std::size_t rows() const { return shape_[0]; }
  std::size_t cols() const { return rank() == 2 ? shape_[1] : 1; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool on) { requires_grad_ = on; }

  bool has_grad() const { return grad_.has_value(); }
  // Throws StateError when no gradient has been populated.
  std::span<const double> grad() const;
  std::span<double> grad();
  // Allocates a zero gradient if none is present and returns it.
  std::span<double> ensure_grad();
  void clear_grad() { grad_.reset(); }

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && values_ == other.values_;
  }

 private:
  Shape shape_;
  std::vector<double> values_;
  bool requires_grad_ = false;
  std::optional<std::vector<double>> grad_;
};

// A trainable tensor together with its stable checkpoint name.
struct NamedParam {
  std::string name;
  Tensor* tensor;
};

}  // namespace tdtrnn
