#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tdtrnn/deptree.h"
#include "tdtrnn/embeddings.h"
#include "tdtrnn/graph.h"
#include "tdtrnn/tensor.h"

namespace tdtrnn {

enum class EncoderKind { kTyped, kPositional, kRelational, kSingle };

std::string_view encoder_name(EncoderKind kind);
// Accepts "typed", "dtrnn"/"positional", "sdtrnn"/"relational", "single".
EncoderKind parse_encoder_kind(std::string_view name);

struct EncoderDims {
  std::size_t word_dim = 300;
  std::size_t hidden = 100;
  std::size_t dep_embed = 10;
  std::size_t relations = 1;  // relation vocabulary size, UNK included
  std::size_t max_offset = 10;
};

// f on node states, g on dependency embeddings.
struct CompositionActivations {
  Activation node = Activation::kTanh;
  Activation dep = Activation::kRelu;

  bool operator==(const CompositionActivations&) const = default;
};

// Shared child matrix over the concatenation (h_k : d_k), with
// d_k = g(W_d z_k + b_d).
struct TypedParams {
  Tensor word_proj;   // W_v  [h x d]
  Tensor child_proj;  // W_r  [h x (h + r)]
  Tensor dep_proj;    // W_d  [r x |V|]
  Tensor dep_bias;    // b_d  [r]
};

// One [h x h] matrix per signed child offset. left[j-1] serves offset -j,
// right[j-1] offset +j; offsets beyond max_offset clamp to the last matrix.
struct PositionalParams {
  Tensor word_proj;
  std::vector<Tensor> left;
  std::vector<Tensor> right;

  Tensor& for_offset(int offset);
};

// One [h x h] matrix per relation index (UNK included).
struct RelationalParams {
  Tensor word_proj;
  std::vector<Tensor> by_relation;
};

struct SingleParams {
  Tensor word_proj;
  Tensor child_proj;  // [h x h]
};

using EncoderParams =
    std::variant<TypedParams, PositionalParams, RelationalParams, SingleParams>;

EncoderKind kind_of(const EncoderParams& params);

// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per matrix, biases included.
EncoderParams init_encoder(EncoderKind kind, const EncoderDims& dims,
                           std::mt19937_64& rng);
Tensor init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                    std::mt19937_64& rng);

// Stable names used by checkpoints: word_proj, child_proj, dep_proj,
// dep_bias, loc_l1.., loc_r1.., dep_0.., ...
std::vector<NamedParam> encoder_parameters(EncoderParams& params);
std::size_t parameter_count(const EncoderParams& params);

// Everything an encoder reads besides its parameters.
struct EncodeContext {
  const WordEmbeddings& words;
  const RelationVocab& relations;
  CompositionActivations activations = {};
};

// d_k for a one-hot relation vector z.
Var dep_embed(Graph& g, Var one_hot_relation, TypedParams& params,
              Activation kind = Activation::kRelu);

// Each returns the root hidden state h_root [h]. The child term is
// l(k) * W (...) and the whole bracket, W_v x_t included, is divided by l(t).
Var encode_typed(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                 TypedParams& params);
Var encode_dtrnn(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                 PositionalParams& params);
Var encode_sdtrnn(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                  RelationalParams& params);
Var encode_single(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                  SingleParams& params);

Var encode(Graph& g, const DepTree& tree, const EncodeContext& ctx,
           EncoderParams& params);

}  // namespace tdtrnn
