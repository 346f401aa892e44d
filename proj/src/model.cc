#include "tdtrnn/model.h"

#include <random>

namespace tdtrnn {

std::vector<NamedParam> Model::parameters() {
  std::vector<NamedParam> out;
  for (auto& p : encoder_parameters(encoder)) {
    out.push_back({"encoder." + p.name, p.tensor});
  }
  for (auto& p : head_parameters(head)) {
    out.push_back({"head." + p.name, p.tensor});
  }
  return out;
}

Model make_model(const ModelConfig& config, RelationVocab relations,
                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EncoderDims dims{.word_dim = config.word_dim,
                   .hidden = config.hidden,
                   .dep_embed = config.dep_embed,
                   .relations = relations.size(),
                   .max_offset = config.max_offset};
  EncoderParams encoder = init_encoder(config.encoder, dims, rng);
  PairHeadParams head = init_pair_head(config.hidden, config.classifier_hidden,
                                       num_classes(config.task), rng);
  return Model{config, std::move(relations), std::move(encoder),
               std::move(head)};
}

Var predict_distribution(Graph& g, Model& model, const DepTree& a,
                         const DepTree& b, const WordEmbeddings& words) {
  const EncodeContext ctx{words, model.relations, model.config.activations};
  Var u = encode(g, a, ctx, model.encoder);
  Var v = encode(g, b, ctx, model.encoder);
  return pair_forward(g, u, v, model.head);
}

std::vector<double> predict(Model& model, const DepTree& a, const DepTree& b,
                            const WordEmbeddings& words) {
  Graph g;
  const auto values = g.value(predict_distribution(g, model, a, b, words)).values();
  return {values.begin(), values.end()};
}

}  // namespace tdtrnn
