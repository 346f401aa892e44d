#include "tdtrnn/encoders.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <unordered_map>

#include "tdtrnn/error.h"

namespace tdtrnn {

std::string_view encoder_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kTyped: return "typed";
    case EncoderKind::kPositional: return "dtrnn";
    case EncoderKind::kRelational: return "sdtrnn";
    case EncoderKind::kSingle: return "single";
  }
  return "?";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  if (name == "typed") return EncoderKind::kTyped;
  if (name == "dtrnn" || name == "positional") return EncoderKind::kPositional;
  if (name == "sdtrnn" || name == "relational") return EncoderKind::kRelational;
  if (name == "single") return EncoderKind::kSingle;
  throw UsageError("unknown encoder kind '" + std::string(name) +
                   "' (expected typed, dtrnn, sdtrnn or single)");
}

Tensor& PositionalParams::for_offset(int offset) {
  if (offset == 0) throw DataError("child offset 0 is not a valid position");
  auto& family = offset < 0 ? left : right;
  const std::size_t rank = static_cast<std::size_t>(std::abs(offset));
  return family.at(std::min(rank, family.size()) - 1);
}

EncoderKind kind_of(const EncoderParams& params) {
  return static_cast<EncoderKind>(params.index());
}

Tensor init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                    std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  const Shape shape = cols == 0 ? Shape{rows} : Shape{rows, cols};
  Tensor t = Tensor::zeros(shape, /*requires_grad=*/true);
  for (double& v : t.values()) v = dist(rng);
  return t;
}

EncoderParams init_encoder(EncoderKind kind, const EncoderDims& dims,
                           std::mt19937_64& rng) {
  const std::size_t h = dims.hidden;
  const std::size_t d = dims.word_dim;
  if (h == 0 || d == 0) throw UsageError("hidden and word dims must be > 0");
  switch (kind) {
    case EncoderKind::kTyped: {
      const std::size_t r = dims.dep_embed;
      const std::size_t v = dims.relations;
      if (r == 0 || v == 0) {
        throw UsageError("typed encoder needs dep_embed > 0 and relations > 0");
      }
      TypedParams p;
      p.word_proj = init_uniform(h, d, d, rng);
      p.child_proj = init_uniform(h, h + r, h + r, rng);
      p.dep_proj = init_uniform(r, v, v, rng);
      p.dep_bias = init_uniform(r, 0, v, rng);
      return p;
    }
    case EncoderKind::kPositional: {
      if (dims.max_offset == 0) throw UsageError("max_offset must be > 0");
      PositionalParams p;
      p.word_proj = init_uniform(h, d, d, rng);
      for (std::size_t j = 0; j < dims.max_offset; ++j) {
        p.left.push_back(init_uniform(h, h, h, rng));
      }
      for (std::size_t j = 0; j < dims.max_offset; ++j) {
        p.right.push_back(init_uniform(h, h, h, rng));
      }
      return p;
    }
    case EncoderKind::kRelational: {
      RelationalParams p;
      p.word_proj = init_uniform(h, d, d, rng);
      for (std::size_t j = 0; j < dims.relations; ++j) {
        p.by_relation.push_back(init_uniform(h, h, h, rng));
      }
      return p;
    }
    case EncoderKind::kSingle: {
      SingleParams p;
      p.word_proj = init_uniform(h, d, d, rng);
      p.child_proj = init_uniform(h, h, h, rng);
      return p;
    }
  }
  throw UsageError("unknown encoder kind");
}

namespace {

struct ParamLister {
  std::vector<NamedParam> out;

  void operator()(TypedParams& p) {
    out = {{"word_proj", &p.word_proj},
           {"child_proj", &p.child_proj},
           {"dep_proj", &p.dep_proj},
           {"dep_bias", &p.dep_bias}};
  }
  void operator()(PositionalParams& p) {
    out = {{"word_proj", &p.word_proj}};
    for (std::size_t j = 0; j < p.left.size(); ++j) {
      out.push_back({"loc_l" + std::to_string(j + 1), &p.left[j]});
    }
    for (std::size_t j = 0; j < p.right.size(); ++j) {
      out.push_back({"loc_r" + std::to_string(j + 1), &p.right[j]});
    }
  }
  void operator()(RelationalParams& p) {
    out = {{"word_proj", &p.word_proj}};
    for (std::size_t j = 0; j < p.by_relation.size(); ++j) {
      out.push_back({"dep_" + std::to_string(j), &p.by_relation[j]});
    }
  }
  void operator()(SingleParams& p) {
    out = {{"word_proj", &p.word_proj}, {"child_proj", &p.child_proj}};
  }
};

// Shared bottom-up recursion. child_term(parent, child, h_child) returns the
// un-scaled W (...) product for one edge.
template <typename ChildTerm>
Var compose(Graph& g, const DepTree& tree, const EncodeContext& ctx,
            Tensor& word_proj, ChildTerm&& child_term) {
  if (tree.empty()) throw DataError("cannot encode an empty tree");
  const auto sizes = subtree_sizes(tree);
  Var w_v = g.param(word_proj);
  std::vector<std::optional<Var>> hidden(tree.size());
  for (std::size_t t : tree.postorder()) {
    const DepNode& node = tree.node(t);
    Var acc = g.matvec(w_v, g.input(ctx.words.lookup(node.form)));
    for (std::size_t k : node.children) {
      Var term = child_term(t, k, *hidden[k - 1]);
      acc = g.add(acc, g.scale(term, static_cast<double>(sizes[k - 1])));
    }
    if (sizes[t - 1] != 1) {
      acc = g.scale(acc, 1.0 / static_cast<double>(sizes[t - 1]));
    }
    hidden[t - 1] = g.activate(acc, ctx.activations.node);
  }
  return *hidden[tree.root() - 1];
}

}  // namespace

std::vector<NamedParam> encoder_parameters(EncoderParams& params) {
  ParamLister lister;
  std::visit(lister, params);
  return lister.out;
}

std::size_t parameter_count(const EncoderParams& params) {
  auto total = [](const std::vector<Tensor>& family) {
    std::size_t n = 0;
    for (const Tensor& t : family) n += t.size();
    return n;
  };
  return std::visit(
      [&](const auto& p) -> std::size_t {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TypedParams>) {
          return p.word_proj.size() + p.child_proj.size() + p.dep_proj.size() +
                 p.dep_bias.size();
        } else if constexpr (std::is_same_v<P, PositionalParams>) {
          return p.word_proj.size() + total(p.left) + total(p.right);
        } else if constexpr (std::is_same_v<P, RelationalParams>) {
          return p.word_proj.size() + total(p.by_relation);
        } else {
          return p.word_proj.size() + p.child_proj.size();
        }
      },
      params);
}

Var dep_embed(Graph& g, Var one_hot_relation, TypedParams& params,
              Activation kind) {
  Var pre = g.add(g.matvec(g.param(params.dep_proj), one_hot_relation),
                  g.param(params.dep_bias));
  return g.activate(pre, kind);
}

Var encode_typed(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                 TypedParams& params) {
  if (params.dep_proj.cols() != ctx.relations.size()) {
    throw DimensionError("dependency projection expects " +
                         std::to_string(params.dep_proj.cols()) +
                         " relations, vocabulary has " +
                         std::to_string(ctx.relations.size()));
  }
  Var w_r = g.param(params.child_proj);
  // d_k depends only on the relation, so one node per distinct relation.
  std::unordered_map<std::size_t, Var> dep_vectors;
  return compose(g, tree, ctx, params.word_proj,
                 [&](std::size_t, std::size_t child, Var h_child) {
                   const std::size_t rel =
                       ctx.relations.index(tree.node(child).relation);
                   auto it = dep_vectors.find(rel);
                   if (it == dep_vectors.end()) {
                     Var z = g.input(one_hot(rel, ctx.relations.size()));
                     it = dep_vectors
                              .emplace(rel, dep_embed(g, z, params,
                                                      ctx.activations.dep))
                              .first;
                   }
                   return g.matvec(w_r, g.concat(h_child, it->second));
                 });
}

Var encode_dtrnn(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                 PositionalParams& params) {
  return compose(g, tree, ctx, params.word_proj,
                 [&](std::size_t parent, std::size_t child, Var h_child) {
                   Tensor& w = params.for_offset(child_offset(tree, parent, child));
                   return g.matvec(g.param(w), h_child);
                 });
}

Var encode_sdtrnn(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                  RelationalParams& params) {
  if (params.by_relation.size() != ctx.relations.size()) {
    throw DimensionError("relational encoder has " +
                         std::to_string(params.by_relation.size()) +
                         " matrices, vocabulary has " +
                         std::to_string(ctx.relations.size()));
  }
  return compose(g, tree, ctx, params.word_proj,
                 [&](std::size_t, std::size_t child, Var h_child) {
                   const std::size_t rel =
                       ctx.relations.index(tree.node(child).relation);
                   return g.matvec(g.param(params.by_relation[rel]), h_child);
                 });
}

Var encode_single(Graph& g, const DepTree& tree, const EncodeContext& ctx,
                  SingleParams& params) {
  Var w = g.param(params.child_proj);
  return compose(g, tree, ctx, params.word_proj,
                 [&](std::size_t, std::size_t, Var h_child) {
                   return g.matvec(w, h_child);
                 });
}

Var encode(Graph& g, const DepTree& tree, const EncodeContext& ctx,
           EncoderParams& params) {
  return std::visit(
      [&](auto& p) -> Var {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TypedParams>) {
          return encode_typed(g, tree, ctx, p);
        } else if constexpr (std::is_same_v<P, PositionalParams>) {
          return encode_dtrnn(g, tree, ctx, p);
        } else if constexpr (std::is_same_v<P, RelationalParams>) {
          return encode_sdtrnn(g, tree, ctx, p);
        } else {
          return encode_single(g, tree, ctx, p);
        }
      },
      params);
}

}  // namespace tdtrnn
