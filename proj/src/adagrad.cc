#include "tdtrnn/adagrad.h"

#include <cmath>
#include <string>

#include "tdtrnn/error.h"

namespace tdtrnn {

AdaGrad::AdaGrad(AdaGradConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0) || !(config_.epsilon > 0.0) ||
      config_.weight_decay < 0.0) {
    throw UsageError(
        "adagrad needs learning_rate > 0, epsilon > 0, weight_decay >= 0");
  }
}

void AdaGrad::step(std::span<Tensor* const> params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->has_grad()) {
      throw StateError("adagrad step: parameter " + std::to_string(i) +
                       " has no gradient");
    }
  }
  if (accumulators_.empty()) {
    for (Tensor* p : params) accumulators_.emplace_back(p->size(), 0.0);
  } else if (accumulators_.size() != params.size()) {
    throw StateError("adagrad step: parameter list changed between steps");
  }

  const double lr = config_.learning_rate;
  const double wd = config_.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    auto& acc = accumulators_[i];
    if (acc.size() != p.size()) {
      throw StateError("adagrad step: parameter " + std::to_string(i) +
                       " changed size");
    }
    auto theta = p.values();
    const auto g = p.grad();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double eff = g[k] + wd * theta[k];
      acc[k] += eff * eff;
      theta[k] -= lr * eff / (std::sqrt(acc[k]) + config_.epsilon);
    }
    p.clear_grad();
  }
  ++steps_;
}

void AdaGrad::step(std::span<const NamedParam> params) {
  std::vector<Tensor*> raw;
  raw.reserve(params.size());
  for (const auto& p : params) raw.push_back(p.tensor);
  step(std::span<Tensor* const>(raw));
}

}  // namespace tdtrnn
