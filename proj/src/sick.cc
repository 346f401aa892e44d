#include "tdtrnn/sick.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "tdtrnn/embeddings.h"
#include "tdtrnn/error.h"
#include "tdtrnn/format.h"

namespace tdtrnn {

std::string_view split_name(SickSplit split) {
  switch (split) {
    case SickSplit::kTrain: return "TRAIN";
    case SickSplit::kTrial: return "TRIAL";
    case SickSplit::kTest: return "TEST";
  }
  return "?";
}

SickSplit parse_split(std::string_view name) {
  const std::string lower = to_lower_ascii(name);
  if (lower == "train") return SickSplit::kTrain;
  if (lower == "trial" || lower == "dev") return SickSplit::kTrial;
  if (lower == "test") return SickSplit::kTest;
  throw DataError("unknown split '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::vector<SickRecord> parse_sick(std::istream& in,
                                   std::optional<SickSplit> default_split) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("SICK file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // Strip a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_tsv(line);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;

  auto require = [&](const std::string& name,
                     const std::string& alias = {}) -> std::size_t {
    if (auto it = column.find(name); it != column.end()) return it->second;
    if (!alias.empty()) {
      if (auto it = column.find(alias); it != column.end()) return it->second;
    }
    throw FormatError("SICK header lacks column " + name);
  };
  const std::size_t c_id = require("pair_ID");
  const std::size_t c_a = require("sentence_A");
  const std::size_t c_b = require("sentence_B");
  const std::size_t c_score = require("relatedness_score");
  const std::size_t c_label = require("entailment_judgment", "entailment_label");
  std::optional<std::size_t> c_split;
  if (auto it = column.find("SemEval_set"); it != column.end()) {
    c_split = it->second;
  } else if (!default_split) {
    throw UsageError(
        "SICK file has no SemEval_set column and no split was given");
  }

  std::vector<SickRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_tsv(line);
    if (cols.size() < header.size()) {
      throw FormatError("SICK line " + std::to_string(line_no) + " has " +
                        std::to_string(cols.size()) + " columns, header has " +
                        std::to_string(header.size()));
    }
    SickRecord r;
    try {
      std::size_t used = 0;
      r.pair_id = std::stoll(cols[c_id], &used);
      if (used != cols[c_id].size()) throw std::invalid_argument("id");
    } catch (const std::exception&) {
      throw FormatError("SICK line " + std::to_string(line_no) +
                        ": bad pair_ID '" + cols[c_id] + "'");
    }
    r.sentence_a = cols[c_a];
    r.sentence_b = cols[c_b];
    try {
      std::size_t used = 0;
      r.relatedness = std::stod(cols[c_score], &used);
      if (used != cols[c_score].size()) throw std::invalid_argument("score");
    } catch (const std::exception&) {
      throw DataError("pair " + std::to_string(r.pair_id) +
                      ": unparseable relatedness '" + cols[c_score] + "'");
    }
    if (!(r.relatedness >= 1.0 && r.relatedness <= 5.0)) {
      throw DataError("pair " + std::to_string(r.pair_id) + ": relatedness " +
                      cols[c_score] + " outside [1, 5]");
    }
    try {
      r.entailment = parse_entailment(cols[c_label]);
    } catch (const DataError& e) {
      throw DataError("pair " + std::to_string(r.pair_id) + ": " + e.what());
    }
    r.split = c_split ? parse_split(cols[*c_split]) : *default_split;
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SickRecord> load_sick(const std::filesystem::path& path,
                                  std::optional<SickSplit> default_split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open SICK file " + path.string());
  return parse_sick(in, default_split);
}

std::string write_sick(std::span<const SickRecord> records) {
  std::ostringstream out;
  out << "pair_ID\tsentence_A\tsentence_B\trelatedness_score\t"
         "entailment_judgment\tSemEval_set\n";
  for (const SickRecord& r : records) {
    out << r.pair_id << '\t' << r.sentence_a << '\t' << r.sentence_b << '\t'
        << shortest(r.relatedness) << '\t' << entailment_name(r.entailment) << '\t'
        << split_name(r.split) << '\n';
  }
  return out.str();
}

SplitCounts split_counts(std::span<const SickRecord> records) {
  SplitCounts c;
  for (const SickRecord& r : records) {
    switch (r.split) {
      case SickSplit::kTrain: ++c.train; break;
      case SickSplit::kTrial: ++c.trial; break;
      case SickSplit::kTest: ++c.test; break;
    }
  }
  return c;
}

Splits make_splits(std::span<const SickRecord> records,
                   std::span<const DepTree> trees_a,
                   std::span<const DepTree> trees_b) {
  if (trees_a.size() != records.size() || trees_b.size() != records.size()) {
    throw DataError("SICK file has " + std::to_string(records.size()) +
                    " pairs but the CoNLL-U files hold " +
                    std::to_string(trees_a.size()) + " (A) and " +
                    std::to_string(trees_b.size()) + " (B) sentences");
  }
  Splits splits;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SickRecord& r = records[i];
    PairExample ex{.pair_id = r.pair_id,
                   .a = trees_a[i],
                   .b = trees_b[i],
                   .relatedness = r.relatedness,
                   .label = r.entailment};
    switch (r.split) {
      case SickSplit::kTrain: splits.train.push_back(std::move(ex)); break;
      case SickSplit::kTrial: splits.dev.push_back(std::move(ex)); break;
      case SickSplit::kTest: splits.test.push_back(std::move(ex)); break;
    }
  }
  return splits;
}

namespace {

std::size_t whitespace_tokens(const std::string& s) {
  std::istringstream in(s);
  std::size_t n = 0;
  std::string tok;
  while (in >> tok) ++n;
  return n;
}

std::size_t abs_diff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

}  // namespace

std::vector<AlignmentIssue> check_alignment(std::span<const SickRecord> records,
                                            std::span<const DepTree> trees_a,
                                            std::span<const DepTree> trees_b,
                                            std::size_t slack) {
  if (trees_a.size() != records.size() || trees_b.size() != records.size()) {
    throw DataError("record and sentence counts differ: " +
                    std::to_string(records.size()) + " pairs, " +
                    std::to_string(trees_a.size()) + " A trees, " +
                    std::to_string(trees_b.size()) + " B trees");
  }
  std::vector<AlignmentIssue> issues;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t na = whitespace_tokens(records[i].sentence_a);
    const std::size_t nb = whitespace_tokens(records[i].sentence_b);
    if (abs_diff(na, trees_a[i].size()) > slack) {
      issues.push_back({i, records[i].pair_id, 'A', na, trees_a[i].size()});
    }
    if (abs_diff(nb, trees_b[i].size()) > slack) {
      issues.push_back({i, records[i].pair_id, 'B', nb, trees_b[i].size()});
    }
  }
  return issues;
}

}  // namespace tdtrnn
