#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdtrnn/adagrad.h"
#include "tdtrnn/deptree.h"
#include "tdtrnn/embeddings.h"
#include "tdtrnn/model.h"
#include "tdtrnn/pairmodel.h"

namespace tdtrnn {

struct PairExample {
  std::int64_t pair_id = 0;
  DepTree a;
  DepTree b;
  double relatedness = 1.0;
  Entailment label = Entailment::kNeutral;
};

struct Splits {
  std::vector<PairExample> train;
  std::vector<PairExample> dev;
  std::vector<PairExample> test;
};

struct Hyperparams {
  Task task = Task::kEntailment;
  EncoderKind encoder = EncoderKind::kTyped;
  double learning_rate = 0.015;
  std::size_t batch_size = 10;
  std::size_t classifier_hidden = 100;
  std::size_t hidden_size = 100;
  std::size_t dep_embed_size = 10;
  std::size_t epochs = 26;
  double weight_decay = 1e-4;
  L2Mode l2_mode = L2Mode::kWeightDecay;
  std::size_t max_offset = 10;
  bool coarse_relations = false;
  std::uint64_t seed = 1;
};

// Defaults per task:
//   relatedness: lr 0.01,  batch 25, c 100, h 130, r 30, 14 epochs, wd 1e-4
//   entailment:  lr 0.015, batch 10, c 100, h 100, r 10, 26 epochs, wd 1e-4
Hyperparams default_hyperparams(Task task);
ModelConfig model_config(const Hyperparams& hp, std::size_t word_dim);

// Target distribution of an example under the given task.
std::vector<double> example_target(const PairExample& ex, Task task);

struct MetricRecord {
  Task task = Task::kEntailment;
  std::size_t count = 0;
  double mean_kl = 0.0;
  // Relatedness. pearson/spearman are empty when undefined (constant
  // predictions); `degenerate` is then set.
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> mse;
  bool degenerate = false;
  // Entailment.
  std::optional<double> accuracy;
  std::array<std::array<std::size_t, 3>, 3> confusion{};  // [gold][predicted]

  // Model-selection metric: dev Pearson or dev accuracy.
  std::optional<double> selection_metric() const;
};

// Throws UsageError on an empty split.
MetricRecord evaluate(Model& model, std::span<const PairExample> split,
                      const WordEmbeddings& words);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> dev_metric;
  std::optional<double> test_metric;
  double wall_seconds = 0.0;
};

std::string log_csv(std::span<const EpochLog> rows);

struct TrainResult {
  Model final_model;
  Model best_model;
  std::size_t best_epoch = 0;
  std::vector<EpochLog> log;
  std::size_t steps = 0;
};

// One optimizer step on one batch: builds every pair's siamese graph in a
// single tape, averages the KL terms, runs backward and steps AdaGrad.
// Returns the batch's mean KL (penalty excluded).
double train_batch(Model& model, std::span<const PairExample* const> batch,
                   const WordEmbeddings& words, AdaGrad& optimizer,
                   const Hyperparams& hp);

using EpochCallback = std::function<void(const EpochLog&)>;

// Relation vocabulary comes from the train split only. Throws UsageError on
// an empty train split and DomainError (with epoch and batch) on a
// non-finite loss.
TrainResult train(const Splits& splits, const WordEmbeddings& words,
                  const Hyperparams& hp, const EpochCallback& on_epoch = {});

std::vector<std::string> tree_words(std::span<const PairExample> examples);

}  // namespace tdtrnn
