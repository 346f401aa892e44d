#include "tdtrnn/commands.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "tdtrnn/checkpoint.h"
#include "tdtrnn/conllu.h"
#include "tdtrnn/embeddings.h"
#include "tdtrnn/error.h"
#include "tdtrnn/format.h"
#include "tdtrnn/synthetic.h"
#include "tdtrnn/trainer.h"

namespace tdtrnn {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) throw UsageError("no " + what + " path given");
  if (!fs::exists(path)) {
    throw UsageError(what + " path does not exist: " + path.string());
  }
}

std::string fmt(double v) { return shortest(v); }

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "undefined"; }

void print_metrics(const MetricRecord& m, std::ostream& out) {
  out << "pairs=" << m.count << " mean_kl=" << fmt(m.mean_kl) << '\n';
  if (m.task == Task::kRelatedness) {
    out << "pearson=" << fmt(m.pearson) << " spearman=" << fmt(m.spearman)
        << " mse=" << fmt(m.mse) << '\n';
    if (m.degenerate) out << "warning: constant predictions, correlations undefined\n";
    return;
  }
  out << "accuracy=" << fmt(m.accuracy) << '\n';
  out << "confusion (rows gold, columns predicted):\n";
  out << std::setw(14) << "";
  for (int p = 0; p < 3; ++p) {
    out << std::setw(14) << entailment_name(static_cast<Entailment>(p));
  }
  out << '\n';
  for (int g = 0; g < 3; ++g) {
    out << std::setw(14) << entailment_name(static_cast<Entailment>(g));
    for (int p = 0; p < 3; ++p) out << std::setw(14) << m.confusion[g][p];
    out << '\n';
  }
}

struct Corpus {
  std::vector<SickRecord> records;
  Splits splits;
};

Corpus load_corpus(const fs::path& sick, const fs::path& a, const fs::path& b) {
  Corpus c;
  c.records = load_sick(sick);
  const auto trees_a = read_conllu(a);
  const auto trees_b = read_conllu(b);
  c.splits = make_splits(c.records, trees_a, trees_b);
  return c;
}

WordSet words_with_lowercase(std::span<const std::string> words) {
  WordSet set;
  for (const auto& w : words) {
    set.insert(w);
    set.insert(to_lower_ascii(w));
  }
  return set;
}

WordSet corpus_words(const Splits& splits) {
  std::vector<std::string> vocab;
  for (const auto* split : {&splits.train, &splits.dev, &splits.test}) {
    const auto w = tree_words(*split);
    vocab.insert(vocab.end(), w.begin(), w.end());
  }
  return words_with_lowercase(vocab);
}

void write_text_atomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write " + tmp.string());
    f << text;
    if (!f.flush()) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UsageError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

Model load_compatible(const fs::path& checkpoint, const WordEmbeddings& words) {
  Model model = load_checkpoint(checkpoint);
  if (model.config.word_dim != words.dim()) {
    throw CompatibilityError("checkpoint expects " +
                             std::to_string(model.config.word_dim) +
                             "-d word vectors, embeddings are " +
                             std::to_string(words.dim()) + "-d");
  }
  return model;
}

}  // namespace

void cmd_train(const RunConfig& config, std::ostream& out) {
  require_file(config.sick, "SICK");
  require_file(config.conllu_a, "CoNLL-U A");
  require_file(config.conllu_b, "CoNLL-U B");
  require_file(config.embeddings, "embeddings");
  if (config.out.empty()) throw UsageError("no output directory given");

  const Corpus corpus = load_corpus(config.sick, config.conllu_a, config.conllu_b);
  const SplitCounts counts = split_counts(corpus.records);
  out << "pairs: train=" << counts.train << " dev=" << counts.trial
      << " test=" << counts.test << '\n';

  const WordSet wanted = corpus_words(corpus.splits);
  const WordEmbeddings words = load_glove_text(config.embeddings, &wanted);
  out << "embeddings: " << words.vocab_size() << " of " << wanted.size()
      << " corpus words, dim " << words.dim() << '\n';
  if (words.dim() == 0) {
    throw FormatError("embeddings file " + config.embeddings.string() +
                      " holds no vectors");
  }

  const Hyperparams& hp = config.hp;
  out << "task=" << task_name(hp.task) << " encoder=" << encoder_name(hp.encoder)
      << " lr=" << hp.learning_rate << " batch=" << hp.batch_size
      << " c=" << hp.classifier_hidden << " h=" << hp.hidden_size
      << " r=" << hp.dep_embed_size << " epochs=" << hp.epochs
      << " wd=" << hp.weight_decay << " seed=" << hp.seed << '\n';

  TrainResult result =
      train(corpus.splits, words, hp, [&](const EpochLog& row) {
        out << "epoch " << row.epoch << " train_loss=" << fmt(row.train_loss)
            << " dev=" << fmt(row.dev_metric) << " test=" << fmt(row.test_metric)
            << '\n';
      });

  fs::create_directories(config.out);
  const fs::path best = config.out / "best.ckpt";
  const fs::path final_path = config.out / "final.ckpt";
  const fs::path log = config.out / "log.csv";
  try {
    save_checkpoint(result.best_model, best);
    save_checkpoint(result.final_model, final_path);
    write_text_atomically(log, log_csv(result.log));
  } catch (...) {
    std::error_code ec;
    for (const auto& p : {best, final_path, log}) fs::remove(p, ec);
    throw;
  }

  out << "best epoch " << result.best_epoch << '\n';
  if (!corpus.splits.test.empty()) {
    out << "test metrics (best checkpoint):\n";
    print_metrics(evaluate(result.best_model, corpus.splits.test, words), out);
  }
}

void cmd_eval(const EvalOptions& options, std::ostream& out) {
  require_file(options.checkpoint, "checkpoint");
  require_file(options.embeddings, "embeddings");
  require_file(options.sick, "SICK");
  require_file(options.conllu_a, "CoNLL-U A");
  require_file(options.conllu_b, "CoNLL-U B");

  const Corpus corpus = load_corpus(options.sick, options.conllu_a, options.conllu_b);
  const WordSet wanted = corpus_words(corpus.splits);
  const WordEmbeddings words = load_glove_text(options.embeddings, &wanted);
  Model model = load_compatible(options.checkpoint, words);
  if (options.task) {
    const std::size_t k = num_classes(*options.task);
    if (k != model.classes() || model.config.task != *options.task) {
      throw CompatibilityError(
          "checkpoint was trained for " + std::string(task_name(model.config.task)) +
          " (K=" + std::to_string(model.classes()) + "), requested " +
          std::string(task_name(*options.task)) + " (K=" + std::to_string(k) + ")");
    }
  }
  const std::vector<PairExample>* split = nullptr;
  switch (options.split) {
    case SickSplit::kTrain: split = &corpus.splits.train; break;
    case SickSplit::kTrial: split = &corpus.splits.dev; break;
    case SickSplit::kTest: split = &corpus.splits.test; break;
  }
  out << "split " << split_name(options.split) << ", task "
      << task_name(model.config.task) << ", encoder "
      << encoder_name(model.config.encoder) << '\n';
  print_metrics(evaluate(model, *split, words), out);
}

void cmd_predict(const PredictOptions& options, std::ostream& out) {
  require_file(options.checkpoint, "checkpoint");
  require_file(options.embeddings, "embeddings");
  require_file(options.conllu_a, "CoNLL-U A");
  require_file(options.conllu_b, "CoNLL-U B");

  const auto trees_a = read_conllu(options.conllu_a);
  const auto trees_b = read_conllu(options.conllu_b);
  if (trees_a.size() != trees_b.size()) {
    throw UsageError("sentence counts differ: " + std::to_string(trees_a.size()) +
                     " in " + options.conllu_a.string() + ", " +
                     std::to_string(trees_b.size()) + " in " +
                     options.conllu_b.string());
  }
  std::vector<std::string> forms;
  for (const auto* trees : {&trees_a, &trees_b}) {
    for (const DepTree& t : *trees) {
      for (const DepNode& n : t.nodes()) forms.push_back(n.form);
    }
  }
  const WordSet wanted = words_with_lowercase(forms);
  const WordEmbeddings words = load_glove_text(options.embeddings, &wanted);
  Model model = load_compatible(options.checkpoint, words);

  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < trees_a.size(); ++i) {
    const auto p = predict(model, trees_a[i], trees_b[i], words);
    if (model.config.task == Task::kRelatedness) {
      out << distribution_to_score(p) << '\n';
    } else {
      out << entailment_name(static_cast<Entailment>(argmax(p)));
      for (double v : p) out << '\t' << v;
      out << '\n';
    }
  }
}

bool cmd_gradcheck(const GradCheckOptions& options, std::ostream& out) {
  PairGradCheckOptions pg;
  pg.graph.corrupt_backward = options.corrupt_backward;
  std::map<std::string, double> worst;
  std::vector<std::string> order;
  bool ok = true;
  out << "encoder " << encoder_name(options.encoder) << ", task "
      << task_name(options.task) << ", step " << pg.step << ", tol " << pg.tol;
  if (options.corrupt_backward) {
    out << ", corrupted backward of " << op_name(*options.corrupt_backward);
  }
  out << '\n';
  for (std::size_t i = 0; i < options.pairs; ++i) {
    const GradCheckReport r =
        check_pair_gradients(options.encoder, options.task, options.seed + i, pg);
    out << "pair " << i + 1 << ": max_rel_error=" << std::scientific
        << std::setprecision(3) << r.max_rel_error << std::defaultfloat
        << " flagged=" << r.flagged << (r.passed() ? " ok" : " FAIL") << '\n';
    ok = ok && r.passed();
    for (const auto& e : r.entries) {
      if (!worst.contains(e.name)) {
        order.push_back(e.name);
        worst[e.name] = 0.0;
      }
      worst[e.name] = std::max(worst[e.name], e.max_rel_error);
    }
  }
  out << "per-parameter max relative error:\n";
  for (const auto& name : order) {
    out << "  " << std::left << std::setw(24) << name << std::right
        << std::scientific << std::setprecision(3) << worst[name]
        << std::defaultfloat << '\n';
  }
  out << (ok ? "PASS" : "FAIL") << '\n';
  return ok;
}

bool cmd_validate(const ValidateOptions& options, std::ostream& out) {
  require_file(options.sick, "SICK");
  require_file(options.conllu_a, "CoNLL-U A");
  require_file(options.conllu_b, "CoNLL-U B");
  const auto records = load_sick(options.sick);
  const auto trees_a = read_conllu(options.conllu_a);
  const auto trees_b = read_conllu(options.conllu_b);
  const auto issues = check_alignment(records, trees_a, trees_b, options.slack);
  const SplitCounts counts = split_counts(records);
  out << "pairs: train=" << counts.train << " trial=" << counts.trial
      << " test=" << counts.test << '\n';
  for (const auto& issue : issues) {
    out << "pair " << issue.pair_id << " (row " << issue.row + 1 << ") side "
        << issue.side << ": sentence has " << issue.sentence_tokens
        << " tokens, tree has " << issue.tree_tokens << '\n';
  }
  out << issues.size() << " misaligned sentence(s)\n";
  return issues.empty();
}

void cmd_make_synthetic(const SyntheticOptions& options, std::ostream& out) {
  if (options.out.empty()) throw UsageError("no output directory given");
  if (options.pairs == 0) throw UsageError("--pairs must be positive");
  const SyntheticCorpus corpus = make_synthetic_corpus(options.pairs, options.seed);
  const WordEmbeddings emb =
      synthetic_embeddings(corpus.vocabulary, options.dim, options.seed);

  std::ostringstream glove;
  for (const auto& w : corpus.vocabulary) {
    glove << w;
    for (double v : emb.row(w)) glove << ' ' << shortest(v);
    glove << '\n';
  }
  std::ostringstream cfg;
  cfg << "# synthetic entailment run\n"
      << "task = entailment\nencoder = typed\n"
      << "sick = sick.tsv\nconllu_a = a.conllu\nconllu_b = b.conllu\n"
      << "embeddings = embeddings.txt\nout = run\n"
      << "hidden_size = 20\ndep_embed_size = 4\nclassifier_hidden = 20\n"
      << "epochs = 5\nseed = 1\n";

  fs::create_directories(options.out);
  write_text_atomically(options.out / "sick.tsv", write_sick(corpus.records));
  write_text_atomically(options.out / "a.conllu", to_conllu(corpus.trees_a));
  write_text_atomically(options.out / "b.conllu", to_conllu(corpus.trees_b));
  write_text_atomically(options.out / "embeddings.txt", glove.str());
  write_text_atomically(options.out / "train.cfg", cfg.str());
  out << "wrote " << options.pairs << " pairs to " << options.out.string() << '\n';
}

std::optional<OpKind> parse_op_kind(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(OpKind::kKlDivergence); ++i) {
    const auto op = static_cast<OpKind>(i);
    if (name == op_name(op)) return op;
  }
  return std::nullopt;
}

namespace {

const std::set<std::string> kPathKeys = {"sick", "conllu_a", "conllu_b",
                                         "embeddings", "out"};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Dependency-tree recursive networks for sentence pairs"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model from a config file");
  std::string config_path;
  train_cmd->add_option("-c,--config", config_path, "key=value config file");
  std::map<std::string, std::string> overrides;
  for (const auto& key : run_config_keys()) {
    train_cmd->add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "override config key " + key);
  }

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a split");
  EvalOptions eval_opts;
  std::string eval_split = "test", eval_task;
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint)->required();
  eval_cmd->add_option("--embeddings", eval_opts.embeddings)->required();
  eval_cmd->add_option("--sick", eval_opts.sick)->required();
  eval_cmd->add_option("--conllu_a,--conllu-a", eval_opts.conllu_a)->required();
  eval_cmd->add_option("--conllu_b,--conllu-b", eval_opts.conllu_b)->required();
  eval_cmd->add_option("--split", eval_split, "train, trial/dev or test");
  eval_cmd->add_option("--task", eval_task, "relatedness or entailment");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "score CoNLL-U sentence pairs");
  PredictOptions predict_opts;
  predict_cmd->add_option("--checkpoint", predict_opts.checkpoint)->required();
  predict_cmd->add_option("--embeddings", predict_opts.embeddings)->required();
  predict_cmd->add_option("--conllu_a,--conllu-a", predict_opts.conllu_a)->required();
  predict_cmd->add_option("--conllu_b,--conllu-b", predict_opts.conllu_b)->required();

  // gradcheck
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
  GradCheckOptions grad_opts;
  std::string grad_encoder = "typed", grad_task = "entailment", corrupt;
  grad_cmd->add_option("--encoder", grad_encoder, "typed, dtrnn, sdtrnn or single");
  grad_cmd->add_option("--task", grad_task);
  grad_cmd->add_option("--seed", grad_opts.seed);
  grad_cmd->add_option("--pairs", grad_opts.pairs);
  grad_cmd->add_option("--corrupt-backward", corrupt,
                       "op whose backward is deliberately wrong (negative control)");

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "check SICK / CoNLL-U alignment");
  ValidateOptions validate_opts;
  validate_cmd->add_option("--sick", validate_opts.sick)->required();
  validate_cmd->add_option("--conllu_a,--conllu-a", validate_opts.conllu_a)->required();
  validate_cmd->add_option("--conllu_b,--conllu-b", validate_opts.conllu_b)->required();
  validate_cmd->add_option("--slack", validate_opts.slack);

  // make-synthetic
  auto* synth_cmd =
      app.add_subcommand("make-synthetic", "write a small synthetic dataset");
  SyntheticOptions synth_opts;
  synth_cmd->add_option("--out", synth_opts.out)->required();
  synth_cmd->add_option("--pairs", synth_opts.pairs);
  synth_cmd->add_option("--seed", synth_opts.seed);
  synth_cmd->add_option("--dim", synth_opts.dim);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train_cmd->parsed()) {
      KeyValues kv;
      if (!config_path.empty()) {
        kv = read_key_values(config_path);
        // Paths in a config file are relative to the file.
        const fs::path base = fs::path(config_path).parent_path();
        for (auto& [key, value] : kv) {
          if (kPathKeys.contains(key) && fs::path(value).is_relative()) {
            value = (base / value).lexically_normal().string();
          }
        }
      }
      for (const auto& [key, value] : overrides) kv[key] = value;
      cmd_train(make_run_config(kv), out);
    } else if (eval_cmd->parsed()) {
      eval_opts.split = parse_split(eval_split);
      if (!eval_task.empty()) eval_opts.task = parse_task(eval_task);
      cmd_eval(eval_opts, out);
    } else if (predict_cmd->parsed()) {
      cmd_predict(predict_opts, out);
    } else if (grad_cmd->parsed()) {
      grad_opts.encoder = parse_encoder_kind(grad_encoder);
      grad_opts.task = parse_task(grad_task);
      if (!corrupt.empty()) {
        grad_opts.corrupt_backward = parse_op_kind(corrupt);
        if (!grad_opts.corrupt_backward) {
          throw UsageError("unknown op '" + corrupt + "'");
        }
      }
      if (!cmd_gradcheck(grad_opts, out)) return 3;
    } else if (validate_cmd->parsed()) {
      if (!cmd_validate(validate_opts, out)) return 2;
    } else if (synth_cmd->parsed()) {
      cmd_make_synthetic(synth_opts, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tdtrnn
