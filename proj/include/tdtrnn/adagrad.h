#pragma once

#include <span>
#include <vector>

#include "tdtrnn/tensor.h"

namespace tdtrnn {

struct AdaGradConfig {
  double learning_rate = 0.01;
  double epsilon = 1e-8;
  // L2 weight decay: the effective gradient is g + weight_decay * theta.
  double weight_decay = 0.0;
};

// Per-coordinate AdaGrad. Accumulators are created on the first step and
// are positionally bound to the parameter list passed then; later steps must
// pass the same parameters in the same order.
class AdaGrad {
 public:
  explicit AdaGrad(AdaGradConfig config);

  // Applies one update to every parameter and clears their gradients.
  // Throws StateError if any parameter lacks a gradient.
  void step(std::span<Tensor* const> params);
  void step(std::span<const NamedParam> params);

  const AdaGradConfig& config() const { return config_; }
  std::span<const double> accumulator(std::size_t param) const {
    return accumulators_.at(param);
  }
  std::size_t steps_taken() const { return steps_; }

 private:
  AdaGradConfig config_;
  std::vector<std::vector<double>> accumulators_;
  std::size_t steps_ = 0;
};

}  // namespace tdtrnn
