#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdtrnn/deptree.h"
#include "tdtrnn/pairmodel.h"
#include "tdtrnn/trainer.h"

namespace tdtrnn {

enum class SickSplit { kTrain, kTrial, kTest };

std::string_view split_name(SickSplit split);  // TRAIN, TRIAL, TEST
SickSplit parse_split(std::string_view name);   // case-insensitive

struct SickRecord {
  std::int64_t pair_id = 0;
  std::string sentence_a;
  std::string sentence_b;
  double relatedness = 1.0;
  Entailment entailment = Entailment::kNeutral;
  SickSplit split = SickSplit::kTrain;

  bool operator==(const SickRecord&) const = default;
};

// Tab-separated with a header naming pair_ID, sentence_A, sentence_B,
// relatedness_score and entailment_judgment (entailment_label is accepted as
// an alias). The split comes from a SemEval_set column when present,
// otherwise from default_split; with neither, UsageError.
// Throws FormatError naming a missing column, DataError with the pair id for
// out-of-range scores or unknown labels.
std::vector<SickRecord> parse_sick(std::istream& in,
                                   std::optional<SickSplit> default_split = {});
std::vector<SickRecord> load_sick(const std::filesystem::path& path,
                                  std::optional<SickSplit> default_split = {});

// Writes the five core columns plus SemEval_set.
std::string write_sick(std::span<const SickRecord> records);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t trial = 0;
  std::size_t test = 0;
};
SplitCounts split_counts(std::span<const SickRecord> records);

// Pairs each record with the tree at the same position in the two sibling
// CoNLL-U sequences and groups by split (TRIAL is the dev split).
// Throws DataError when the counts differ.
Splits make_splits(std::span<const SickRecord> records,
                   std::span<const DepTree> trees_a,
                   std::span<const DepTree> trees_b);

struct AlignmentIssue {
  std::size_t row;  // 0-based record position
  std::int64_t pair_id;
  char side;        // 'A' or 'B'
  std::size_t sentence_tokens;
  std::size_t tree_tokens;
};

// Token-count heuristic: a record is flagged when the tree's token count
// differs from the whitespace token count of the sentence by more than
// `slack` (punctuation splitting and contractions account for small gaps).
std::vector<AlignmentIssue> check_alignment(std::span<const SickRecord> records,
                                            std::span<const DepTree> trees_a,
                                            std::span<const DepTree> trees_b,
                                            std::size_t slack = 2);

}  // namespace tdtrnn
