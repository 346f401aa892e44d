#include "tdtrnn/tensor.h"

#include <functional>
#include <numeric>
#include <sstream>

#include "tdtrnn/error.h"

namespace tdtrnn {

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

namespace {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : shape_(std::move(shape)),
      values_(std::move(values)),
      requires_grad_(requires_grad) {
  if (shape_.empty() || shape_.size() > 2) {
    throw DimensionError("tensor rank must be 1 or 2, got shape " +
                         shape_string(shape_));
  }
  if (element_count(shape_) != values_.size()) {
    throw DimensionError("shape " + shape_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) +
                         " values, got " + std::to_string(values_.size()));
  }
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape.empty() ? 0 : element_count(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::span<const double> Tensor::grad() const {
  if (!grad_) throw StateError("tensor has no gradient");
  return *grad_;
}

std::span<double> Tensor::grad() {
  if (!grad_) throw StateError("tensor has no gradient");
  return *grad_;
}

std::span<double> Tensor::ensure_grad() {
  if (!grad_) grad_.emplace(values_.size(), 0.0);
  return *grad_;
}

}  // namespace tdtrnn
