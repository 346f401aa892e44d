#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tdtrnn/graph.h"
#include "tdtrnn/tensor.h"

namespace tdtrnn {

// Builds a scalar loss inside the given graph from the current parameter
// values. Must be deterministic in the parameters.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckEntry {
  std::string name;
  std::size_t checked = 0;
  std::size_t flagged = 0;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  std::size_t flagged = 0;
  bool passed() const { return flagged == 0; }
};

// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double a, double b);

// Compares the autodiff gradient of every parameter entry against the central
// difference (L(theta + step) - L(theta - step)) / (2 step). Entries whose
// relative error exceeds tol are flagged. Parameter values are restored and
// gradients cleared on return. Throws DomainError on a non-finite loss.
GradCheckReport grad_check(const LossBuilder& build_loss,
                           std::span<const NamedParam> params, double step,
                           double tol, GraphOptions analytic_options = {});

}  // namespace tdtrnn
