#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdtrnn/graph.h"
#include "tdtrnn/tensor.h"

namespace tdtrnn {

enum class Task { kRelatedness, kEntailment };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);
// K: 5 relatedness classes, 3 entailment classes.
std::size_t num_classes(Task task);

// Class index order is fixed: Contradiction, Neutral, Entailment.
enum class Entailment { kContradiction = 0, kNeutral = 1, kEntailment = 2 };

std::string_view entailment_name(Entailment label);  // "CONTRADICTION", ...
// Case-insensitive; throws DataError for anything else.
Entailment parse_entailment(std::string_view label);

struct TargetDistribution {
  Task task;
  std::vector<double> p;
};

// Spreads a gold score over the two neighbouring integer classes:
// p[floor(y)] = floor(y) - y + 1, p[floor(y) + 1] = y - floor(y) (1-based).
// Integer scores, K included, give a one-hot vector. Throws DomainError for
// y outside [1, K].
TargetDistribution score_to_distribution(double y, std::size_t k = 5);
// sum_i i * p_i with classes numbered from 1.
double distribution_to_score(std::span<const double> p);
TargetDistribution entailment_target(Entailment label);
std::size_t argmax(std::span<const double> p);

// Classifier over [(u * v) : |u - v|]:
//   h_s = tanh(W_c feat + b_c),  p_hat = softmax(W_p h_s + b_p).
struct PairHeadParams {
  Tensor hidden_proj;  // W_c [c x 2h]
  Tensor hidden_bias;  // b_c [c]
  Tensor out_proj;     // W_p [K x c]
  Tensor out_bias;     // b_p [K]

  std::size_t hidden() const { return hidden_proj.cols() / 2; }
  std::size_t classes() const { return out_bias.size(); }
};

PairHeadParams init_pair_head(std::size_t hidden, std::size_t classifier_hidden,
                              std::size_t classes, std::mt19937_64& rng);
std::vector<NamedParam> head_parameters(PairHeadParams& params);

Var pair_features(Graph& g, Var u, Var v);
Var pair_forward(Graph& g, Var u, Var v, PairHeadParams& params);

// Where the L2 penalty lives. Exactly one path is active.
enum class L2Mode { kWeightDecay, kLossTerm };

struct PairTerm {
  std::span<const double> target;
  Var p_hat;
};

// (1/m) sum_j KL(p_j || p_hat_j) + (lambda/2) sum ||theta||^2. The penalty is
// only added when lambda > 0 and params is non-empty. Throws UsageError on
// an empty batch.
Var pair_loss(Graph& g, std::span<const PairTerm> batch,
              std::span<const NamedParam> params, double lambda);

}  // namespace tdtrnn
