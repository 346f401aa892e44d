#include "tdtrnn/pairmodel.h"

#include <algorithm>
#include <cmath>

#include "tdtrnn/embeddings.h"
#include "tdtrnn/encoders.h"
#include "tdtrnn/error.h"

namespace tdtrnn {

std::string_view task_name(Task task) {
  return task == Task::kRelatedness ? "relatedness" : "entailment";
}

Task parse_task(std::string_view name) {
  if (name == "relatedness" || name == "sick-r" || name == "SICK-R") {
    return Task::kRelatedness;
  }
  if (name == "entailment" || name == "sick-e" || name == "SICK-E") {
    return Task::kEntailment;
  }
  throw UsageError("unknown task '" + std::string(name) +
                   "' (expected relatedness or entailment)");
}

std::size_t num_classes(Task task) {
  return task == Task::kRelatedness ? 5 : 3;
}

std::string_view entailment_name(Entailment label) {
  switch (label) {
    case Entailment::kContradiction: return "CONTRADICTION";
    case Entailment::kNeutral: return "NEUTRAL";
    case Entailment::kEntailment: return "ENTAILMENT";
  }
  return "?";
}

Entailment parse_entailment(std::string_view label) {
  const std::string lower = to_lower_ascii(label);
  if (lower == "contradiction") return Entailment::kContradiction;
  if (lower == "neutral") return Entailment::kNeutral;
  if (lower == "entailment") return Entailment::kEntailment;
  throw DataError("unknown entailment label '" + std::string(label) + "'");
}

TargetDistribution score_to_distribution(double y, std::size_t k) {
  if (!(y >= 1.0 && y <= static_cast<double>(k))) {
    throw DomainError("score " + std::to_string(y) + " outside [1, " +
                      std::to_string(k) + "]");
  }
  TargetDistribution t{Task::kRelatedness, std::vector<double>(k, 0.0)};
  const double floor_y = std::floor(y);
  const auto lower = static_cast<std::size_t>(floor_y);  // 1-based class
  const double frac = y - floor_y;
  t.p[lower - 1] = floor_y - y + 1.0;
  if (lower < k && frac > 0.0) t.p[lower] = frac;
  return t;
}

double distribution_to_score(std::span<const double> p) {
  double score = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    score += static_cast<double>(i + 1) * p[i];
  }
  return score;
}

TargetDistribution entailment_target(Entailment label) {
  TargetDistribution t{Task::kEntailment, std::vector<double>(3, 0.0)};
  t.p[static_cast<std::size_t>(label)] = 1.0;
  return t;
}

std::size_t argmax(std::span<const double> p) {
  return static_cast<std::size_t>(
      std::distance(p.begin(), std::max_element(p.begin(), p.end())));
}

PairHeadParams init_pair_head(std::size_t hidden, std::size_t classifier_hidden,
                              std::size_t classes, std::mt19937_64& rng) {
  if (hidden == 0 || classifier_hidden == 0 || classes == 0) {
    throw UsageError("pair head dimensions must be positive");
  }
  PairHeadParams p;
  p.hidden_proj = init_uniform(classifier_hidden, 2 * hidden, 2 * hidden, rng);
  p.hidden_bias = init_uniform(classifier_hidden, 0, 2 * hidden, rng);
  p.out_proj = init_uniform(classes, classifier_hidden, classifier_hidden, rng);
  p.out_bias = init_uniform(classes, 0, classifier_hidden, rng);
  return p;
}

std::vector<NamedParam> head_parameters(PairHeadParams& params) {
  return {{"hidden_proj", &params.hidden_proj},
          {"hidden_bias", &params.hidden_bias},
          {"out_proj", &params.out_proj},
          {"out_bias", &params.out_bias}};
}

Var pair_features(Graph& g, Var u, Var v) {
  return g.concat(g.mul(u, v), g.abs_diff(u, v));
}

Var pair_forward(Graph& g, Var u, Var v, PairHeadParams& params) {
  const Tensor& ut = g.value(u);
  const Tensor& vt = g.value(v);
  if (ut.shape() != vt.shape() || ut.size() != params.hidden()) {
    throw DimensionError("pair head expects two vectors of size " +
                         std::to_string(params.hidden()) + ", got " +
                         shape_string(ut.shape()) + " and " +
                         shape_string(vt.shape()));
  }
  Var feat = pair_features(g, u, v);
  Var hs = g.tanh(g.add(g.matvec(g.param(params.hidden_proj), feat),
                        g.param(params.hidden_bias)));
  Var logits =
      g.add(g.matvec(g.param(params.out_proj), hs), g.param(params.out_bias));
  return g.softmax(logits);
}

Var pair_loss(Graph& g, std::span<const PairTerm> batch,
              std::span<const NamedParam> params, double lambda) {
  if (batch.empty()) throw UsageError("pair_loss on an empty batch");
  Var total = g.kl_divergence(batch[0].target, batch[0].p_hat);
  for (std::size_t j = 1; j < batch.size(); ++j) {
    total = g.add(total, g.kl_divergence(batch[j].target, batch[j].p_hat));
  }
  Var loss = g.scale(total, 1.0 / static_cast<double>(batch.size()));
  if (lambda > 0.0 && !params.empty()) {
    Var norm = g.sum_squares(g.param(*params[0].tensor));
    for (std::size_t i = 1; i < params.size(); ++i) {
      norm = g.add(norm, g.sum_squares(g.param(*params[i].tensor)));
    }
    loss = g.add(loss, g.scale(norm, lambda / 2.0));
  }
  return loss;
}

}  // namespace tdtrnn
