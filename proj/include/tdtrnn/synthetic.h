#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdtrnn/deptree.h"
#include "tdtrnn/embeddings.h"
#include "tdtrnn/grad_check.h"
#include "tdtrnn/model.h"
#include "tdtrnn/sick.h"

namespace tdtrnn {

// Random tree over n words: each token after the first picked as root
// attaches to a uniformly chosen earlier-placed token. Words and relations
// are drawn uniformly from the given pools.
DepTree random_tree(std::mt19937_64& rng, std::size_t n_words,
                    std::span<const std::string> words,
                    std::span<const std::string> relations);

// "the fish is following the turtle" and its subject/object swap, as parsed
// CoNLL-U trees that differ only in their nsubj/dobj edge labels.
std::pair<DepTree, DepTree> mirrored_pair();
extern const char* const kMirroredConllu;

// Template sentence pairs with learnable labels:
//   identical or adjective-dropped  -> ENTAILMENT
//   "nobody" replaces the subject    -> CONTRADICTION
//   subject/object swapped, or a pair of unrelated sentences -> NEUTRAL
// Relatedness scores follow the label with seeded jitter.
struct SyntheticCorpus {
  std::vector<SickRecord> records;
  std::vector<DepTree> trees_a;
  std::vector<DepTree> trees_b;
  std::vector<std::string> vocabulary;
};

SyntheticCorpus make_synthetic_corpus(std::size_t pairs, std::uint64_t seed,
                                      double trial_fraction = 0.15,
                                      double test_fraction = 0.15);

// Gradient check of the full pair loss (encoder + head + KL) for one
// random small tree pair of 3-8 words per side. Dimensions are kept small
// so every entry can be checked.
struct PairGradCheckOptions {
  std::size_t word_dim = 6;
  std::size_t hidden = 5;
  std::size_t dep_embed = 3;
  std::size_t classifier_hidden = 4;
  // Word vector entries are uniform in [-word_scale, word_scale], roughly the
  // spread of pre-trained vectors.
  double word_scale = 1.0;
  double step = 1e-5;
  double tol = 1e-4;
  GraphOptions graph = {};
};

// The random instance behind check_pair_gradients.
struct PairGradCheckInstance {
  DepTree a;
  DepTree b;
  WordEmbeddings words;
  Model model;
  std::vector<double> target;
};

PairGradCheckInstance make_pair_grad_check_instance(
    EncoderKind kind, Task task, std::uint64_t seed,
    const PairGradCheckOptions& options = {});

// Unregularized single-pair loss KL(target || p_hat).
Var pair_instance_loss(Graph& g, PairGradCheckInstance& instance);

GradCheckReport check_pair_gradients(EncoderKind kind, Task task,
                                     std::uint64_t seed,
                                     const PairGradCheckOptions& options = {});

}  // namespace tdtrnn
