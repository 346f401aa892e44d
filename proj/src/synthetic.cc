#include "tdtrnn/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tdtrnn/conllu.h"
#include "tdtrnn/error.h"
#include "tdtrnn/model.h"

namespace tdtrnn {

DepTree random_tree(std::mt19937_64& rng, std::size_t n_words,
                    std::span<const std::string> words,
                    std::span<const std::string> relations) {
  if (n_words == 0 || words.empty() || relations.empty()) {
    throw UsageError("random_tree needs words, relations and n > 0");
  }
  std::vector<std::size_t> order(n_words);
  for (std::size_t i = 0; i < n_words; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> heads(n_words, 0);
  for (std::size_t i = 1; i < n_words; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    heads[order[i] - 1] = order[pick(rng)];
  }
  std::uniform_int_distribution<std::size_t> word_pick(0, words.size() - 1);
  std::uniform_int_distribution<std::size_t> rel_pick(0, relations.size() - 1);
  std::vector<std::string> forms(n_words), rels(n_words);
  for (std::size_t i = 0; i < n_words; ++i) {
    forms[i] = words[word_pick(rng)];
    rels[i] = heads[i] == 0 ? "root" : relations[rel_pick(rng)];
  }
  return DepTree::from_heads(std::move(forms), std::move(heads),
                             std::move(rels));
}

const char* const kMirroredConllu =
    "# text = the fish is following the turtle\n"
    "1\tthe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n"
    "2\tfish\tfish\tNOUN\tNN\t_\t4\tnsubj\t_\t_\n"
    "3\tis\tbe\tAUX\tVBZ\t_\t4\taux\t_\t_\n"
    "4\tfollowing\tfollow\tVERB\tVBG\t_\t0\troot\t_\t_\n"
    "5\tthe\tthe\tDET\tDT\t_\t6\tdet\t_\t_\n"
    "6\tturtle\tturtle\tNOUN\tNN\t_\t4\tdobj\t_\t_\n"
    "\n"
    "# text = the turtle is following the fish\n"
    "1\tthe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n"
    "2\tturtle\tturtle\tNOUN\tNN\t_\t4\tnsubj\t_\t_\n"
    "3\tis\tbe\tAUX\tVBZ\t_\t4\taux\t_\t_\n"
    "4\tfollowing\tfollow\tVERB\tVBG\t_\t0\troot\t_\t_\n"
    "5\tthe\tthe\tDET\tDT\t_\t6\tdet\t_\t_\n"
    "6\tfish\tfish\tNOUN\tNN\t_\t4\tdobj\t_\t_\n"
    "\n";

std::pair<DepTree, DepTree> mirrored_pair() {
  auto trees = parse_conllu(kMirroredConllu);
  return {std::move(trees[0]), std::move(trees[1])};
}

namespace {

const std::array<std::string, 12> kNouns = {
    "dog", "cat",  "man",  "woman", "child", "fish",
    "turtle", "horse", "bird", "girl", "boy", "monkey"};
const std::array<std::string, 8> kVerbs = {
    "chasing", "following", "watching", "feeding",
    "holding", "pushing",   "kicking",  "riding"};
const std::array<std::string, 6> kAdjectives = {"small", "brown", "young",
                                                "white", "big",   "old"};

struct Sentence {
  std::string text;
  DepTree tree;
};

// [the [adj] subject | nobody] is verb the object
Sentence make_sentence(const std::string* adjective, const std::string* subject,
                       const std::string& verb, const std::string& object) {
  std::vector<std::string> forms;
  std::vector<std::size_t> heads;
  std::vector<std::string> rels;
  // Token positions are computed up front so heads can refer forward.
  const std::size_t subj_len = subject ? (adjective ? 3 : 2) : 1;
  const std::size_t subj_tok = subj_len;
  const std::size_t verb_tok = subj_len + 2;
  if (subject) {
    forms.push_back("the");
    heads.push_back(subj_tok);
    rels.push_back("det");
    if (adjective) {
      forms.push_back(*adjective);
      heads.push_back(subj_tok);
      rels.push_back("amod");
    }
    forms.push_back(*subject);
  } else {
    forms.push_back("nobody");
  }
  heads.push_back(verb_tok);
  rels.push_back("nsubj");
  forms.push_back("is");
  heads.push_back(verb_tok);
  rels.push_back("aux");
  forms.push_back(verb);
  heads.push_back(0);
  rels.push_back("root");
  forms.push_back("the");
  heads.push_back(verb_tok + 2);
  rels.push_back("det");
  forms.push_back(object);
  heads.push_back(verb_tok);
  rels.push_back("dobj");

  std::string text;
  for (const auto& f : forms) {
    if (!text.empty()) text += ' ';
    text += f;
  }
  return {text, DepTree::from_heads(std::move(forms), std::move(heads),
                                    std::move(rels))};
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(std::size_t pairs, std::uint64_t seed,
                                      double trial_fraction,
                                      double test_fraction) {
  std::mt19937_64 rng(seed);
  auto pick = [&](auto const& pool) -> const std::string& {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticCorpus corpus;
  corpus.vocabulary.assign(kNouns.begin(), kNouns.end());
  corpus.vocabulary.insert(corpus.vocabulary.end(), kVerbs.begin(), kVerbs.end());
  corpus.vocabulary.insert(corpus.vocabulary.end(), kAdjectives.begin(),
                           kAdjectives.end());
  for (const char* w : {"the", "is", "nobody"}) corpus.vocabulary.emplace_back(w);

  const std::size_t n_test = static_cast<std::size_t>(std::round(pairs * test_fraction));
  const std::size_t n_trial = static_cast<std::size_t>(std::round(pairs * trial_fraction));
  const std::size_t n_train = pairs - std::min(pairs, n_test + n_trial);

  for (std::size_t i = 0; i < pairs; ++i) {
    const std::string& subj = pick(kNouns);
    std::string obj = pick(kNouns);
    while (obj == subj) obj = pick(kNouns);
    const std::string& verb = pick(kVerbs);
    const std::string& adj = pick(kAdjectives);
    const bool with_adj = unit(rng) < 0.5;

    Sentence a = make_sentence(with_adj ? &adj : nullptr, &subj, verb, obj);
    Sentence b;
    Entailment label = Entailment::kNeutral;
    double lo = 1.0, hi = 2.0;
    switch (i % 5) {
      case 0:
        b = make_sentence(with_adj ? &adj : nullptr, &subj, verb, obj);
        label = Entailment::kEntailment;
        lo = 4.6, hi = 5.0;
        break;
      case 1:
        a = make_sentence(&adj, &subj, verb, obj);
        b = make_sentence(nullptr, &subj, verb, obj);
        label = Entailment::kEntailment;
        lo = 4.2, hi = 4.8;
        break;
      case 2:
        b = make_sentence(nullptr, nullptr, verb, obj);
        label = Entailment::kContradiction;
        lo = 3.2, hi = 3.8;
        break;
      case 3:
        a = make_sentence(nullptr, &subj, verb, obj);
        b = make_sentence(nullptr, &obj, verb, subj);
        label = Entailment::kNeutral;
        lo = 3.5, hi = 4.1;
        break;
      default: {
        std::string s2 = pick(kNouns);
        std::string o2 = pick(kNouns);
        while (s2 == subj || s2 == obj) s2 = pick(kNouns);
        while (o2 == s2 || o2 == subj || o2 == obj) o2 = pick(kNouns);
        std::string v2 = pick(kVerbs);
        while (v2 == verb) v2 = pick(kVerbs);
        b = make_sentence(nullptr, &s2, v2, o2);
        label = Entailment::kNeutral;
        lo = 1.0, hi = 2.0;
        break;
      }
    }
    const double score = std::round((lo + (hi - lo) * unit(rng)) * 10.0) / 10.0;

    SickRecord r;
    r.pair_id = static_cast<std::int64_t>(i + 1);
    r.sentence_a = a.text;
    r.sentence_b = b.text;
    r.relatedness = score;
    r.entailment = label;
    r.split = i < n_train ? SickSplit::kTrain
                          : (i < n_train + n_trial ? SickSplit::kTrial
                                                   : SickSplit::kTest);
    corpus.records.push_back(std::move(r));
    corpus.trees_a.push_back(std::move(a.tree));
    corpus.trees_b.push_back(std::move(b.tree));
  }
  return corpus;
}

PairGradCheckInstance make_pair_grad_check_instance(
    EncoderKind kind, Task task, std::uint64_t seed,
    const PairGradCheckOptions& options) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f",
                                          "g", "h", "i", "j", "k", "l"};
  const std::vector<std::string> relations = {"nsubj", "dobj", "det",
                                              "amod",  "aux",  "nmod"};
  std::uniform_int_distribution<std::size_t> length(3, 8);
  DepTree a = random_tree(rng, length(rng), words, relations);
  DepTree b = random_tree(rng, length(rng), words, relations);
  WordEmbeddings emb = synthetic_embeddings(words, options.word_dim, seed + 17,
                                            options.word_scale);

  const std::vector<DepTree> both = {a, b};
  ModelConfig config;
  config.task = task;
  config.encoder = kind;
  config.word_dim = options.word_dim;
  config.hidden = options.hidden;
  config.dep_embed = options.dep_embed;
  config.classifier_hidden = options.classifier_hidden;
  config.max_offset = 3;
  Model model = make_model(config, RelationVocab::from_trees(both), seed + 1);

  std::vector<double> target;
  if (task == Task::kRelatedness) {
    std::uniform_real_distribution<double> score(1.0, 5.0);
    target = score_to_distribution(score(rng)).p;
  } else {
    std::uniform_int_distribution<int> label(0, 2);
    target = entailment_target(static_cast<Entailment>(label(rng))).p;
  }
  return {std::move(a), std::move(b), std::move(emb), std::move(model),
          std::move(target)};
}

Var pair_instance_loss(Graph& g, PairGradCheckInstance& instance) {
  Var p_hat = predict_distribution(g, instance.model, instance.a, instance.b,
                                   instance.words);
  const PairTerm term{instance.target, p_hat};
  return pair_loss(g, std::span<const PairTerm>(&term, 1), {}, 0.0);
}

GradCheckReport check_pair_gradients(EncoderKind kind, Task task,
                                     std::uint64_t seed,
                                     const PairGradCheckOptions& options) {
  PairGradCheckInstance instance =
      make_pair_grad_check_instance(kind, task, seed, options);
  auto params = instance.model.parameters();
  LossBuilder build = [&](Graph& g) { return pair_instance_loss(g, instance); };
  return grad_check(build, params, options.step, options.tol, options.graph);
}

}  // namespace tdtrnn
