#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdtrnn/encoders.h"
#include "tdtrnn/graph.h"
#include "tdtrnn/pairmodel.h"
#include "tdtrnn/run_config.h"
#include "tdtrnn/sick.h"

namespace tdtrnn {

// Exit codes: 0 success, 1 usage/config, 2 data format, 3 numeric failure.

// Writes <out>/best.ckpt, <out>/final.ckpt and <out>/log.csv. On any error
// none of the three is left behind.
void cmd_train(const RunConfig& config, std::ostream& out);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path embeddings;
  std::filesystem::path sick;
  std::filesystem::path conllu_a;
  std::filesystem::path conllu_b;
  SickSplit split = SickSplit::kTest;
  std::optional<Task> task;
};
void cmd_eval(const EvalOptions& options, std::ostream& out);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path embeddings;
  std::filesystem::path conllu_a;
  std::filesystem::path conllu_b;
};
// One line per pair: "<score>" for relatedness, "<LABEL> p0 p1 p2" for
// entailment.
void cmd_predict(const PredictOptions& options, std::ostream& out);

struct GradCheckOptions {
  EncoderKind encoder = EncoderKind::kTyped;
  Task task = Task::kEntailment;
  std::uint64_t seed = 1;
  std::size_t pairs = 5;
  std::optional<OpKind> corrupt_backward;
};
// Returns true when every pair passes.
bool cmd_gradcheck(const GradCheckOptions& options, std::ostream& out);

struct ValidateOptions {
  std::filesystem::path sick;
  std::filesystem::path conllu_a;
  std::filesystem::path conllu_b;
  std::size_t slack = 2;
};
// Returns true when no pair is misaligned.
bool cmd_validate(const ValidateOptions& options, std::ostream& out);

struct SyntheticOptions {
  std::filesystem::path out;
  std::size_t pairs = 60;
  std::uint64_t seed = 7;
  std::size_t dim = 16;
};
// Writes sick.tsv, a.conllu, b.conllu, embeddings.txt and train.cfg.
void cmd_make_synthetic(const SyntheticOptions& options, std::ostream& out);

// Parses arguments (without the program name), runs the subcommand and maps
// errors to exit codes. Messages go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

std::optional<OpKind> parse_op_kind(std::string_view name);

}  // namespace tdtrnn
