#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdtrnn/trainer.h"

namespace tdtrnn {

using KeyValues = std::map<std::string, std::string>;

// Flat "key = value" text. '#' starts a comment; blank lines are ignored.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

// Everything cmd_train needs. Keys mirror the Hyperparams field names:
//   task, encoder, learning_rate, batch_size, classifier_hidden,
//   hidden_size, dep_embed_size, epochs, weight_decay, l2_mode
//   (weight_decay | loss_term), max_offset, coarse_relations, seed
// plus the paths sick, conllu_a, conllu_b, embeddings and out (output
// directory).
struct RunConfig {
  std::filesystem::path sick;
  std::filesystem::path conllu_a;
  std::filesystem::path conllu_b;
  std::filesystem::path embeddings;
  std::filesystem::path out;
  Hyperparams hp;
};

// Task defaults are applied first, then every given key. Unknown keys and
// malformed values throw UsageError.
RunConfig make_run_config(const KeyValues& kv);

// Every accepted key, in documentation order.
const std::vector<std::string>& run_config_keys();

}  // namespace tdtrnn
