#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracle.h"
#include "tdtrnn/encoders.h"
#include "tdtrnn/error.h"
#include "tdtrnn/grad_check.h"
#include "tdtrnn/model.h"
#include "tdtrnn/synthetic.h"

using namespace tdtrnn;

namespace {

const std::vector<std::string> kWords{"the", "fish", "is", "following",
                                      "turtle", "small", "red", "a"};
const std::vector<std::string> kRels{"det", "nsubj", "aux", "dobj", "amod"};

const EncoderKind kAllKinds[] = {EncoderKind::kTyped, EncoderKind::kPositional,
                                 EncoderKind::kRelational, EncoderKind::kSingle};

Model small_model(EncoderKind kind, std::uint64_t seed, std::size_t d = 6,
                  std::size_t h = 5, std::size_t r = 3) {
  ModelConfig c;
  c.encoder = kind;
  c.word_dim = d;
  c.hidden = h;
  c.dep_embed = r;
  c.classifier_hidden = 4;
  c.max_offset = 3;
  return make_model(c, RelationVocab::from_labels(kRels), seed);
}

std::vector<double> root_vector(Model& m, const DepTree& t,
                                const WordEmbeddings& words) {
  Graph g;
  EncodeContext ctx{words, m.relations, m.config.activations};
  const auto v = g.value(encode(g, t, ctx, m.encoder)).values();
  return {v.begin(), v.end()};
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Tensor& word_proj(Model& m) {
  return std::visit([](auto& p) -> Tensor& { return p.word_proj; }, m.encoder);
}

}  // namespace

TEST_SUITE("encoders") {

TEST_CASE("encoder names parse") {
  CHECK(parse_encoder_kind("typed") == EncoderKind::kTyped);
  CHECK(parse_encoder_kind("dtrnn") == EncoderKind::kPositional);
  CHECK(parse_encoder_kind("positional") == EncoderKind::kPositional);
  CHECK(parse_encoder_kind("sdtrnn") == EncoderKind::kRelational);
  CHECK(parse_encoder_kind("single") == EncoderKind::kSingle);
  CHECK_THROWS_AS((void)parse_encoder_kind("lstm"), UsageError);
  for (EncoderKind k : kAllKinds) CHECK(parse_encoder_kind(encoder_name(k)) == k);
}

TEST_CASE("single-word tree gives tanh(W_v x) for every encoder") {
  const auto words = synthetic_embeddings(kWords, 6, 3, 1.0);
  const auto tree = DepTree::from_heads({"fish"}, {0}, {"root"});
  for (EncoderKind kind : kAllKinds) {
    Model m = small_model(kind, 7);
    const auto got = root_vector(m, tree, words);
    const Tensor& wv = word_proj(m);
    const auto x = words.row("fish");
    for (std::size_t i = 0; i < wv.rows(); ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < wv.cols(); ++j) acc += wv.at(i, j) * x[j];
      CHECK(std::fabs(got[i] - std::tanh(acc)) < 1e-15);
    }
  }
}

TEST_CASE("typed two-node tree matches a hand evaluation") {
  // h = d = 2, r = 1, relations {<unk>, rel}.
  RelationVocab vocab;
  vocab.add("rel");
  WordEmbeddings words(2);
  const std::vector<double> x0{0.5, -1.0}, x1{2.0, 0.25};
  words.insert("w0", x0);
  words.insert("w1", x1);
  TypedParams p{
      .word_proj = Tensor::matrix(2, 2, {0.1, 0.2, -0.3, 0.4}),
      .child_proj = Tensor::matrix(2, 3, {0.5, -0.6, 0.7, 0.8, 0.9, -1.0}),
      .dep_proj = Tensor::matrix(1, 2, {0.3, -0.2}),
      .dep_bias = Tensor::vector({0.05}),
  };
  const auto tree = DepTree::from_heads({"w0", "w1"}, {0, 1}, {"root", "rel"});
  Graph g;
  EncodeContext ctx{words, vocab};
  const auto got = g.value(encode_typed(g, tree, ctx, p)).values();

  // Leaf: h1 = tanh(W_v x1).
  const double h1a = std::tanh(0.1 * 2.0 + 0.2 * 0.25);
  const double h1b = std::tanh(-0.3 * 2.0 + 0.4 * 0.25);
  // d = relu(W_d[:, 1] + b_d) = relu(-0.2 + 0.05) = 0.
  const double d = std::max(0.0, -0.2 + 0.05);
  // Root: tanh((W_v x0 + 1 * W_r (h1 : d)) / 2).
  const double r0 = 0.1 * 0.5 + 0.2 * -1.0 + (0.5 * h1a - 0.6 * h1b + 0.7 * d);
  const double r1 = -0.3 * 0.5 + 0.4 * -1.0 + (0.8 * h1a + 0.9 * h1b - 1.0 * d);
  CHECK(std::fabs(got[0] - std::tanh(r0 / 2)) < 1e-15);
  CHECK(std::fabs(got[1] - std::tanh(r1 / 2)) < 1e-15);
}

TEST_CASE("every encoder matches the straight-line oracle on random trees") {
  std::mt19937_64 rng(61);
  for (EncoderKind kind : kAllKinds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Model m = small_model(kind, seed);
      const auto words = synthetic_embeddings(kWords, 6, seed + 100, 1.0);
      const DepTree t = random_tree(rng, 2 + seed % 7, kWords, kRels);
      const auto got = root_vector(m, t, words);
      oracle::PairOracle<double> o{m, words};
      const auto expect = o.encode(t);
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::fabs(got[i] - expect[i]) < 1e-12);
      }
    }
  }
}

TEST_CASE("positional encoder selects left and right matrices") {
  Model m = small_model(EncoderKind::kPositional, 5);
  auto& p = std::get<PositionalParams>(m.encoder);
  const auto words = synthetic_embeddings(kWords, 6, 9, 1.0);
  const auto tree = DepTree::from_heads({"the", "fish", "is"}, {2, 0, 2},
                                        {"det", "root", "aux"});
  const auto left_swap = DepTree::from_heads({"red", "fish", "is"}, {2, 0, 2},
                                             {"det", "root", "aux"});
  const auto right_swap = DepTree::from_heads({"the", "fish", "red"}, {2, 0, 2},
                                              {"det", "root", "aux"});
  const auto base = root_vector(m, tree, words);
  CHECK(distance(base, root_vector(m, left_swap, words)) > 1e-6);

  p.left[0] = Tensor::zeros(p.left[0].shape(), true);
  const auto no_left = root_vector(m, tree, words);
  CHECK(distance(no_left, root_vector(m, left_swap, words)) == 0.0);
  CHECK(distance(no_left, root_vector(m, right_swap, words)) > 1e-6);

  Model m2 = small_model(EncoderKind::kPositional, 5);
  auto& p2 = std::get<PositionalParams>(m2.encoder);
  p2.right[0] = Tensor::zeros(p2.right[0].shape(), true);
  const auto no_right = root_vector(m2, tree, words);
  CHECK(distance(no_right, root_vector(m2, right_swap, words)) == 0.0);
  CHECK(distance(no_right, root_vector(m2, left_swap, words)) > 1e-6);
}

TEST_CASE("positional offsets clamp to the extreme matrix") {
  Model m = small_model(EncoderKind::kPositional, 2);
  auto& p = std::get<PositionalParams>(m.encoder);
  CHECK(p.left.size() == 3);
  CHECK(p.right.size() == 3);
  CHECK(&p.for_offset(-3) == &p.left[2]);
  CHECK(&p.for_offset(-9) == &p.left[2]);
  CHECK(&p.for_offset(4) == &p.right[2]);
  CHECK(&p.for_offset(1) == &p.right[0]);
}

TEST_CASE("relational encoder shares one matrix across same-relation children") {
  const auto words = synthetic_embeddings(kWords, 6, 4, 1.0);
  const auto same = DepTree::from_heads({"small", "fish", "red"}, {2, 0, 2},
                                        {"amod", "root", "amod"});
  Model m = small_model(EncoderKind::kRelational, 3);
  auto& p = std::get<RelationalParams>(m.encoder);
  const std::size_t amod = m.relations.index("amod");
  const std::size_t det = m.relations.index("det");
  {
    Graph g;
    EncodeContext ctx{words, m.relations};
    g.backward(g.sum(encode_sdtrnn(g, same, ctx, p)));
  }
  const std::vector<double> shared(p.by_relation[amod].grad().begin(),
                                   p.by_relation[amod].grad().end());

  // Same tree with the second child routed to a copy of the same matrix.
  Model m2 = small_model(EncoderKind::kRelational, 3);
  auto& p2 = std::get<RelationalParams>(m2.encoder);
  p2.by_relation[det] = p2.by_relation[amod];
  const auto split = DepTree::from_heads({"small", "fish", "red"}, {2, 0, 2},
                                         {"amod", "root", "det"});
  {
    Graph g;
    EncodeContext ctx{words, m2.relations};
    g.backward(g.sum(encode_sdtrnn(g, split, ctx, p2)));
  }
  for (std::size_t i = 0; i < shared.size(); ++i) {
    CHECK(std::fabs(shared[i] - (p2.by_relation[amod].grad()[i] +
                                 p2.by_relation[det].grad()[i])) < 1e-14);
  }
}

TEST_CASE("unknown relations use the UNK matrix") {
  const auto words = synthetic_embeddings(kWords, 6, 4, 1.0);
  Model m = small_model(EncoderKind::kRelational, 3);
  const auto a = DepTree::from_heads({"the", "fish"}, {2, 0}, {"weird", "root"});
  const auto b = DepTree::from_heads({"the", "fish"}, {2, 0}, {"other", "root"});
  CHECK(root_vector(m, a, words) == root_vector(m, b, words));
}

TEST_CASE("single encoder is invariant to swapping equal-size siblings") {
  const auto words = synthetic_embeddings(kWords, 6, 8, 1.0);
  Model m = small_model(EncoderKind::kSingle, 4);
  const auto t1 = DepTree::from_heads(
      {"the", "fish", "is", "following", "the", "turtle"}, {2, 4, 4, 0, 6, 4},
      {"det", "nsubj", "aux", "root", "det", "dobj"});
  const auto t2 = DepTree::from_heads(
      {"the", "turtle", "is", "following", "the", "fish"}, {2, 4, 4, 0, 6, 4},
      {"det", "nsubj", "aux", "root", "det", "dobj"});
  CHECK(distance(root_vector(m, t1, words), root_vector(m, t2, words)) < 1e-12);
}

TEST_CASE("mirrored pair") {
  const auto [a, b] = mirrored_pair();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto words = synthetic_embeddings(kWords, 6, seed, 1.0);
    Model single = small_model(EncoderKind::kSingle, seed);
    CHECK(distance(root_vector(single, a, words), root_vector(single, b, words)) < 1e-12);
    Model rel = small_model(EncoderKind::kRelational, seed);
    CHECK(distance(root_vector(rel, a, words), root_vector(rel, b, words)) > 1e-6);
    // Both swapped noun phrases have two words, so the typed difference term
    // (l_a - l_b) W_d' (d1 - d2) vanishes.
    Model typed = small_model(EncoderKind::kTyped, seed);
    CHECK(distance(root_vector(typed, a, words), root_vector(typed, b, words)) < 1e-12);
  }
}

TEST_CASE("typed encoder sibling permutation") {
  // The nsubj and dobj subtrees trade places: "the small fish" (3 words) and
  // "turtle" (1 word).
  const std::vector<std::string> fa{"the", "small", "fish", "is", "following", "turtle"};
  const std::vector<std::size_t> ha{3, 3, 5, 5, 0, 5};
  const std::vector<std::string> fb{"turtle", "is", "following", "the", "small", "fish"};
  const std::vector<std::size_t> hb{3, 3, 0, 6, 6, 3};
  const std::vector<std::string> ra{"det", "amod", "nsubj", "aux", "root", "dobj"};
  const std::vector<std::string> rb{"nsubj", "aux", "root", "det", "amod", "dobj"};
  const std::vector<std::string> ua{"det", "amod", "dep", "aux", "root", "dep"};
  const std::vector<std::string> ub{"dep", "aux", "root", "det", "amod", "dep"};
  std::vector<std::string> rels = kRels;
  rels.push_back("dep");
  std::size_t differing = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto words = synthetic_embeddings(kWords, 6, seed, 1.0);
    ModelConfig c;
    c.word_dim = 6;
    c.hidden = 5;
    c.dep_embed = 3;
    c.classifier_hidden = 4;
    Model m = make_model(c, RelationVocab::from_labels(rels), seed);
    Graph g;
    auto& p = std::get<TypedParams>(m.encoder);
    const auto dn = g.value(dep_embed(g, g.input(one_hot("nsubj", m.relations)), p));
    const auto dd = g.value(dep_embed(g, g.input(one_hot("dobj", m.relations)), p));
    if (!(dn == dd)) {
      ++differing;
      const auto a = DepTree::from_heads(fa, ha, ra);
      const auto b = DepTree::from_heads(fb, hb, rb);
      CHECK(distance(root_vector(m, a, words), root_vector(m, b, words)) > 1e-6);
    }
    // One shared relation on both slots: the permutation is invisible.
    const auto a = DepTree::from_heads(fa, ha, ua);
    const auto b = DepTree::from_heads(fb, hb, ub);
    CHECK(distance(root_vector(m, a, words), root_vector(m, b, words)) < 1e-12);
  }
  CHECK(differing > 0);
}

TEST_CASE("typed encoder invariant to swapping equal-size differently typed siblings") {
  const auto words = synthetic_embeddings(kWords, 6, 12, 1.0);
  Model m = small_model(EncoderKind::kTyped, 12);
  const auto t1 = DepTree::from_heads({"fish", "following", "turtle"}, {2, 0, 2},
                                      {"nsubj", "root", "dobj"});
  const auto t2 = DepTree::from_heads({"turtle", "following", "fish"}, {2, 0, 2},
                                      {"nsubj", "root", "dobj"});
  CHECK(distance(root_vector(m, t1, words), root_vector(m, t2, words)) < 1e-12);
}

TEST_CASE("hidden states stay inside the tanh range") {
  std::mt19937_64 rng(67);
  for (EncoderKind kind : kAllKinds) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Model m = small_model(kind, seed);
      const auto words = synthetic_embeddings(kWords, 6, seed, 3.0);
      const DepTree t = random_tree(rng, 1 + seed % 8, kWords, kRels);
      oracle::PairOracle<double> o{m, words};
      for (std::size_t k = 1; k <= t.size(); ++k) {
        for (double x : o.hidden(t, k)) CHECK(std::fabs(x) < 1.0);
      }
      for (double x : root_vector(m, t, words)) CHECK(std::fabs(x) < 1.0);
    }
  }
}

TEST_CASE("encoding is bitwise deterministic") {
  std::mt19937_64 rng(71);
  const DepTree t = random_tree(rng, 7, kWords, kRels);
  for (EncoderKind kind : kAllKinds) {
    Model m = small_model(kind, 2);
    Model m2 = small_model(kind, 2);
    const auto words = synthetic_embeddings(kWords, 6, 2, 1.0);
    CHECK(root_vector(m, t, words) == root_vector(m, t, words));
    CHECK(root_vector(m, t, words) == root_vector(m2, t, words));
  }
}

TEST_CASE("dep_embed") {
  const RelationVocab vocab = RelationVocab::from_labels(kRels);
  std::mt19937_64 rng(73);
  EncoderDims dims{.word_dim = 4, .hidden = 3, .dep_embed = 5,
                   .relations = vocab.size(), .max_offset = 2};
  auto params = std::get<TypedParams>(init_encoder(EncoderKind::kTyped, dims, rng));

  SUBCASE("zero weights give zero embeddings") {
    TypedParams z = params;
    z.dep_proj = Tensor::zeros(z.dep_proj.shape(), true);
    z.dep_bias = Tensor::zeros(z.dep_bias.shape(), true);
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      Graph g;
      const auto d = g.value(dep_embed(g, g.input(one_hot(j, vocab.size())), z));
      for (double x : d.values()) CHECK(x == 0.0);
    }
  }
  SUBCASE("one-hot picks a column") {
    for (std::size_t j = 0; j < vocab.size(); ++j) {
      Graph g;
      const auto d = g.value(dep_embed(g, g.input(one_hot(j, vocab.size())), params));
      for (std::size_t i = 0; i < 5; ++i) {
        CHECK(d[i] == std::max(0.0, params.dep_proj.at(i, j) + params.dep_bias[i]));
      }
    }
  }
  SUBCASE("size mismatch") {
    Graph g;
    CHECK_THROWS_AS((void)dep_embed(g, g.input(one_hot(0, vocab.size() + 1)), params),
                    DimensionError);
  }
}

TEST_CASE("distinct relations give distinct dependency embeddings") {
  const RelationVocab vocab = RelationVocab::from_labels(kRels);
  std::size_t distinct = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    EncoderDims dims{.word_dim = 4, .hidden = 3, .dep_embed = 10,
                     .relations = vocab.size(), .max_offset = 2};
    auto p = std::get<TypedParams>(init_encoder(EncoderKind::kTyped, dims, rng));
    Graph g;
    const auto a = g.value(dep_embed(g, g.input(one_hot("nsubj", vocab)), p));
    const auto b = g.value(dep_embed(g, g.input(one_hot("dobj", vocab)), p));
    distinct += !(a == b);
  }
  CHECK(distinct == 100);
}

TEST_CASE("parameter shapes and counts") {
  const std::size_t d = 7, h = 5, r = 3, V = 6, off = 4;
  EncoderDims dims{.word_dim = d, .hidden = h, .dep_embed = r, .relations = V,
                   .max_offset = off};
  std::mt19937_64 rng(79);
  auto typed = init_encoder(EncoderKind::kTyped, dims, rng);
  const auto& tp = std::get<TypedParams>(typed);
  CHECK(tp.word_proj.shape() == Shape{h, d});
  CHECK(tp.child_proj.shape() == Shape{h, h + r});
  CHECK(tp.dep_proj.shape() == Shape{r, V});
  CHECK(tp.dep_bias.shape() == Shape{r});
  CHECK(parameter_count(typed) == V * r + r + h * (h + r) + h * d);
  CHECK(parameter_count(init_encoder(EncoderKind::kSingle, dims, rng)) == h * h + h * d);
  CHECK(parameter_count(init_encoder(EncoderKind::kPositional, dims, rng)) ==
        2 * off * h * h + h * d);
  CHECK(parameter_count(init_encoder(EncoderKind::kRelational, dims, rng)) ==
        V * h * h + h * d);
  for (auto& np : encoder_parameters(typed)) CHECK(np.tensor->requires_grad());
}

TEST_CASE("initialisation respects the fan-in bound") {
  std::mt19937_64 rng(83);
  const Tensor t = init_uniform(20, 30, 16, rng);
  for (double x : t.values()) CHECK(std::fabs(x) <= 0.25);
}

TEST_CASE("encoder gradients pass a finite-difference check") {
  std::mt19937_64 rng(89);
  for (EncoderKind kind : kAllKinds) {
    Model m = small_model(kind, 6);
    const auto words = synthetic_embeddings(kWords, 6, 6, 1.0);
    const DepTree t = random_tree(rng, 5, kWords, kRels);
    const auto weights = synthetic_embeddings(std::vector<std::string>{"w"}, 5, 1, 1.0);
    const Tensor w = weights.lookup("w");
    auto params = encoder_parameters(m.encoder);
    const auto report = grad_check(
        [&](Graph& g) {
          EncodeContext ctx{words, m.relations};
          return g.sum(g.mul(encode(g, t, ctx, m.encoder), g.input(w)));
        },
        params, 1e-5, 1e-4);
    CHECK(report.passed());
  }
}

}  // TEST_SUITE
