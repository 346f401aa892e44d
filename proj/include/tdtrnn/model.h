#pragma once

#include <cstdint>
#include <vector>

#include "tdtrnn/deptree.h"
#include "tdtrnn/embeddings.h"
#include "tdtrnn/encoders.h"
#include "tdtrnn/graph.h"
#include "tdtrnn/pairmodel.h"

namespace tdtrnn {

struct ModelConfig {
  Task task = Task::kEntailment;
  EncoderKind encoder = EncoderKind::kTyped;
  std::size_t word_dim = 300;
  std::size_t hidden = 100;
  std::size_t dep_embed = 10;
  std::size_t classifier_hidden = 100;
  std::size_t max_offset = 10;
  bool coarse_relations = false;
  CompositionActivations activations = {};

  bool operator==(const ModelConfig&) const = default;
};

// Siamese pair model: one encoder applied to both sentences (tied weights)
// followed by the pair head. Copyable, so snapshots are plain copies.
struct Model {
  ModelConfig config;
  RelationVocab relations;
  EncoderParams encoder;
  PairHeadParams head;

  // Encoder parameters first, then the head, in a fixed order.
  std::vector<NamedParam> parameters();
  std::size_t classes() const { return head.classes(); }
};

Model make_model(const ModelConfig& config, RelationVocab relations,
                 std::uint64_t seed);

// Builds u = enc(a), v = enc(b), p_hat = head(u, v) inside g.
Var predict_distribution(Graph& g, Model& model, const DepTree& a,
                         const DepTree& b, const WordEmbeddings& words);

// Convenience: forward only, returns p_hat values.
std::vector<double> predict(Model& model, const DepTree& a, const DepTree& b,
                            const WordEmbeddings& words);

}  // namespace tdtrnn
