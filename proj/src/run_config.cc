#include "tdtrnn/run_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "tdtrnn/embeddings.h"
#include "tdtrnn/error.h"

namespace tdtrnn {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("config key " + key + ": not a number: '" + value + "'");
}

std::size_t to_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size() && v >= 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw UsageError("config key " + key + ": not a non-negative integer: '" +
                   value + "'");
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = to_lower_ascii(value);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw UsageError("config key " + key + ": not a boolean: '" + value + "'");
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key=value");
    }
    kv[trim(std::string_view(t).substr(0, eq))] =
        trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys = {
      "task",          "encoder",        "learning_rate", "batch_size",
      "classifier_hidden", "hidden_size", "dep_embed_size", "epochs",
      "weight_decay",  "l2_mode",        "max_offset",    "coarse_relations",
      "seed",          "sick",           "conllu_a",      "conllu_b",
      "embeddings",    "out"};
  return keys;
}

RunConfig make_run_config(const KeyValues& kv) {
  const std::set<std::string> kKnown(run_config_keys().begin(),
                                     run_config_keys().end());
  for (const auto& [key, value] : kv) {
    if (!kKnown.contains(key)) throw UsageError("unknown config key '" + key + "'");
  }

  RunConfig rc;
  const auto task_it = kv.find("task");
  const Task task =
      task_it == kv.end() ? Task::kEntailment : parse_task(task_it->second);
  rc.hp = default_hyperparams(task);

  for (const auto& [key, value] : kv) {
    Hyperparams& hp = rc.hp;
    if (key == "encoder") hp.encoder = parse_encoder_kind(value);
    else if (key == "learning_rate") hp.learning_rate = to_double(key, value);
    else if (key == "batch_size") hp.batch_size = to_size(key, value);
    else if (key == "classifier_hidden") hp.classifier_hidden = to_size(key, value);
    else if (key == "hidden_size") hp.hidden_size = to_size(key, value);
    else if (key == "dep_embed_size") hp.dep_embed_size = to_size(key, value);
    else if (key == "epochs") hp.epochs = to_size(key, value);
    else if (key == "weight_decay") hp.weight_decay = to_double(key, value);
    else if (key == "max_offset") hp.max_offset = to_size(key, value);
    else if (key == "coarse_relations") hp.coarse_relations = to_bool(key, value);
    else if (key == "seed") hp.seed = to_size(key, value);
    else if (key == "l2_mode") {
      if (value == "weight_decay") hp.l2_mode = L2Mode::kWeightDecay;
      else if (value == "loss_term") hp.l2_mode = L2Mode::kLossTerm;
      else throw UsageError("l2_mode must be weight_decay or loss_term");
    }
    else if (key == "sick") rc.sick = value;
    else if (key == "conllu_a") rc.conllu_a = value;
    else if (key == "conllu_b") rc.conllu_b = value;
    else if (key == "embeddings") rc.embeddings = value;
    else if (key == "out") rc.out = value;
  }
  return rc;
}

}  // namespace tdtrnn
