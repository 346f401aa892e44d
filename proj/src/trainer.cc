#include "tdtrnn/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "tdtrnn/error.h"
#include "tdtrnn/format.h"
#include "tdtrnn/graph.h"
#include "tdtrnn/metrics.h"

namespace tdtrnn {

Hyperparams default_hyperparams(Task task) {
  Hyperparams hp;
  hp.task = task;
  if (task == Task::kRelatedness) {
    hp.learning_rate = 0.01;
    hp.batch_size = 25;
    hp.classifier_hidden = 100;
    hp.hidden_size = 130;
    hp.dep_embed_size = 30;
    hp.epochs = 14;
    hp.weight_decay = 1e-4;
  } else {
    hp.learning_rate = 0.015;
    hp.batch_size = 10;
    hp.classifier_hidden = 100;
    hp.hidden_size = 100;
    hp.dep_embed_size = 10;
    hp.epochs = 26;
    hp.weight_decay = 1e-4;
  }
  return hp;
}

ModelConfig model_config(const Hyperparams& hp, std::size_t word_dim) {
  ModelConfig c;
  c.task = hp.task;
  c.encoder = hp.encoder;
  c.word_dim = word_dim;
  c.hidden = hp.hidden_size;
  c.dep_embed = hp.dep_embed_size;
  c.classifier_hidden = hp.classifier_hidden;
  c.max_offset = hp.max_offset;
  c.coarse_relations = hp.coarse_relations;
  return c;
}

std::vector<double> example_target(const PairExample& ex, Task task) {
  if (task == Task::kRelatedness) {
    return score_to_distribution(ex.relatedness, num_classes(task)).p;
  }
  return entailment_target(ex.label).p;
}

std::optional<double> MetricRecord::selection_metric() const {
  return task == Task::kRelatedness ? pearson : accuracy;
}

namespace {

double kl_value(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

void validate(const Hyperparams& hp) {
  if (!(hp.learning_rate > 0.0) || hp.batch_size == 0 ||
      hp.classifier_hidden == 0 || hp.hidden_size == 0 ||
      hp.dep_embed_size == 0 || hp.epochs == 0 || hp.weight_decay < 0.0 ||
      hp.max_offset == 0) {
    throw UsageError("hyperparameters must be positive (weight_decay >= 0)");
  }
}

}  // namespace

MetricRecord evaluate(Model& model, std::span<const PairExample> split,
                      const WordEmbeddings& words) {
  if (split.empty()) throw UsageError("cannot evaluate an empty split");
  MetricRecord rec;
  rec.task = model.config.task;
  rec.count = split.size();
  std::vector<double> predicted_scores, gold_scores;
  std::vector<std::size_t> predicted_labels, gold_labels;
  double kl_total = 0.0;
  for (const PairExample& ex : split) {
    const auto p_hat = predict(model, ex.a, ex.b, words);
    kl_total += kl_value(example_target(ex, rec.task), p_hat);
    if (rec.task == Task::kRelatedness) {
      predicted_scores.push_back(distribution_to_score(p_hat));
      gold_scores.push_back(ex.relatedness);
    } else {
      predicted_labels.push_back(argmax(p_hat));
      gold_labels.push_back(static_cast<std::size_t>(ex.label));
      ++rec.confusion[gold_labels.back()][predicted_labels.back()];
    }
  }
  rec.mean_kl = kl_total / static_cast<double>(split.size());
  if (rec.task == Task::kRelatedness) {
    rec.mse = mse(predicted_scores, gold_scores);
    if (split.size() >= 2) {
      try {
        rec.pearson = pearson(predicted_scores, gold_scores);
        rec.spearman = spearman(predicted_scores, gold_scores);
      } catch (const DegenerateInputError&) {
        rec.degenerate = true;
      }
    } else {
      rec.degenerate = true;
    }
  } else {
    rec.accuracy = accuracy(predicted_labels, gold_labels);
  }
  return rec;
}

std::string log_csv(std::span<const EpochLog> rows) {
  std::ostringstream out;
  out << "epoch,train_loss,dev_metric,test_metric,wall_seconds\n";
  for (const EpochLog& r : rows) {
    out << r.epoch << ',' << shortest(r.train_loss) << ',';
    if (r.dev_metric) out << shortest(*r.dev_metric);
    out << ',';
    if (r.test_metric) out << shortest(*r.test_metric);
    out << ',' << std::setprecision(6) << r.wall_seconds << '\n';
  }
  return out.str();
}

double train_batch(Model& model, std::span<const PairExample* const> batch,
                   const WordEmbeddings& words, AdaGrad& optimizer,
                   const Hyperparams& hp) {
  if (batch.empty()) throw UsageError("empty batch");
  auto params = model.parameters();
  for (auto& p : params) p.tensor->clear_grad();

  Graph g;
  std::vector<std::vector<double>> targets;
  targets.reserve(batch.size());
  std::vector<PairTerm> terms;
  terms.reserve(batch.size());
  for (const PairExample* ex : batch) {
    targets.push_back(example_target(*ex, hp.task));
    terms.push_back({targets.back(),
                     predict_distribution(g, model, ex->a, ex->b, words)});
  }
  const bool loss_term = hp.l2_mode == L2Mode::kLossTerm;
  Var loss = pair_loss(g, terms, loss_term ? std::span<const NamedParam>(params)
                                            : std::span<const NamedParam>(),
                       loss_term ? hp.weight_decay : 0.0);
  const double loss_value = g.scalar(loss);
  if (!std::isfinite(loss_value)) {
    throw DomainError("non-finite training loss");
  }
  double kl_total = 0.0;
  for (const PairTerm& t : terms) {
    kl_total += kl_value(t.target, g.value(t.p_hat).values());
  }
  g.backward(loss);
  // Parameters that took no part in this batch (unused offsets/relations)
  // still get a zero gradient so every coordinate is stepped.
  for (auto& p : params) p.tensor->ensure_grad();
  optimizer.step(std::span<const NamedParam>(params));
  return kl_total / static_cast<double>(batch.size());
}

std::vector<std::string> tree_words(std::span<const PairExample> examples) {
  std::vector<std::string> out;
  for (const PairExample& ex : examples) {
    for (const DepTree* t : {&ex.a, &ex.b}) {
      for (const DepNode& n : t->nodes()) out.push_back(n.form);
    }
  }
  return out;
}

TrainResult train(const Splits& splits, const WordEmbeddings& words,
                  const Hyperparams& hp, const EpochCallback& on_epoch) {
  validate(hp);
  if (splits.train.empty()) throw UsageError("train split is empty");
  if (words.dim() == 0) throw UsageError("word embeddings are empty");

  std::vector<DepTree> train_trees;
  train_trees.reserve(2 * splits.train.size());
  for (const PairExample& ex : splits.train) {
    train_trees.push_back(ex.a);
    train_trees.push_back(ex.b);
  }
  RelationVocab relations =
      RelationVocab::from_trees(train_trees, hp.coarse_relations);

  Model model = make_model(model_config(hp, words.dim()), std::move(relations),
                           hp.seed);
  AdaGrad optimizer(AdaGradConfig{
      .learning_rate = hp.learning_rate,
      .epsilon = 1e-8,
      .weight_decay = hp.l2_mode == L2Mode::kWeightDecay ? hp.weight_decay : 0.0});

  std::mt19937_64 shuffle_rng(hp.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(splits.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{.final_model = model, .best_model = model, .best_epoch = 0,
                     .log = {}, .steps = 0};
  std::optional<double> best_dev;
  const auto start = std::chrono::steady_clock::now();
  std::vector<const PairExample*> batch;

  for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double kl_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += hp.batch_size) {
      const std::size_t end = std::min(begin + hp.batch_size, order.size());
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(&splits.train[order[i]]);
      }
      ++batch_index;
      try {
        kl_sum += train_batch(model, batch, words, optimizer, hp) *
                  static_cast<double>(batch.size());
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at epoch " +
                          std::to_string(epoch) + ", batch " +
                          std::to_string(batch_index));
      }
      ++result.steps;
    }

    EpochLog row;
    row.epoch = epoch;
    row.train_loss = kl_sum / static_cast<double>(order.size());
    if (!splits.dev.empty()) {
      row.dev_metric = evaluate(model, splits.dev, words).selection_metric();
    }
    if (!splits.test.empty()) {
      row.test_metric = evaluate(model, splits.test, words).selection_metric();
    }
    row.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();

    const bool no_dev = splits.dev.empty();
    if (no_dev || (row.dev_metric && (!best_dev || *row.dev_metric > *best_dev))) {
      if (row.dev_metric) best_dev = row.dev_metric;
      result.best_model = model;
      result.best_epoch = epoch;
    }
    result.log.push_back(row);
    if (on_epoch) on_epoch(row);
  }
  if (result.best_epoch == 0) {
    result.best_model = model;
    result.best_epoch = hp.epochs;
  }
  result.final_model = std::move(model);
  return result;
}

}  // namespace tdtrnn
