#include "tdtrnn/grad_check.h"

#include <algorithm>
#include <cmath>

#include "tdtrnn/error.h"

namespace tdtrnn {

double relative_error(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-8});
  return std::fabs(a - b) / denom;
}

namespace {

double evaluate_loss(const LossBuilder& build_loss) {
  Graph g;
  const double loss = g.scalar(build_loss(g));
  if (!std::isfinite(loss)) throw DomainError("grad_check: non-finite loss");
  return loss;
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& build_loss,
                           std::span<const NamedParam> params, double step,
                           double tol, GraphOptions analytic_options) {
  for (const auto& p : params) p.tensor->clear_grad();
  {
    Graph g(analytic_options);
    Var loss = build_loss(g);
    if (!std::isfinite(g.scalar(loss))) {
      throw DomainError("grad_check: non-finite loss");
    }
    g.backward(loss);
  }

  GradCheckReport report;
  for (const auto& p : params) {
    Tensor& t = *p.tensor;
    const std::vector<double> analytic =
        t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                     : std::vector<double>(t.size(), 0.0);
    GradCheckEntry entry{.name = p.name};
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double saved = t[k];
      t[k] = saved + step;
      const double up = evaluate_loss(build_loss);
      t[k] = saved - step;
      const double down = evaluate_loss(build_loss);
      t[k] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double err = relative_error(analytic[k], numeric);
      ++entry.checked;
      entry.max_rel_error = std::max(entry.max_rel_error, err);
      if (err > tol) ++entry.flagged;
    }
    t.clear_grad();
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.flagged += entry.flagged;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace tdtrnn
