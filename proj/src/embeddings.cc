#include "tdtrnn/embeddings.h"

#include <charconv>
#include <cmath>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "tdtrnn/error.h"

namespace tdtrnn {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::optional<std::size_t> WordVocab::find(std::string_view word) const {
  auto it = rows_.find(std::string(word));
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

std::size_t WordVocab::add(std::string word) {
  if (auto it = rows_.find(word); it != rows_.end()) return it->second;
  const std::size_t row = words_.size();
  rows_.emplace(word, row);
  words_.push_back(std::move(word));
  return row;
}

bool WordEmbeddings::insert(std::string word, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw FormatError("embedding for '" + word + "' has dimension " +
                      std::to_string(vector.size()) + ", expected " +
                      std::to_string(dim_));
  }
  if (contains(word)) return false;
  vocab_.add(std::move(word));
  table_.insert(table_.end(), vector.begin(), vector.end());
  return true;
}

std::span<const double> WordEmbeddings::row(std::string_view word) const {
  auto found = vocab_.find(word);
  if (!found) found = vocab_.find(to_lower_ascii(word));
  if (!found) return oov_;
  return std::span<const double>(table_).subspan(*found * dim_, dim_);
}

Tensor WordEmbeddings::lookup(std::string_view word) const {
  const auto r = row(word);
  return Tensor::vector(std::vector<double>(r.begin(), r.end()));
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
    throw FormatError("line " + std::to_string(line_no) +
                      ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

WordEmbeddings parse_glove_text(std::istream& in, const WordSet* restrict_to) {
  WordEmbeddings emb;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::string raw;
  std::vector<double> vec;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (fields.size() < 2) {
      throw FormatError("line " + std::to_string(line_no) +
                        ": word without vector");
    }
    const std::size_t this_dim = fields.size() - 1;
    if (dim == 0) {
      dim = this_dim;
      emb = WordEmbeddings(dim);
    } else if (this_dim != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": dimension " +
                        std::to_string(this_dim) + " differs from " +
                        std::to_string(dim));
    }
    std::string word(fields[0]);
    if (restrict_to && !restrict_to->contains(word)) continue;
    vec.clear();
    for (std::size_t k = 1; k < fields.size(); ++k) {
      vec.push_back(parse_double(fields[k], line_no));
    }
    emb.insert(std::move(word), vec);
  }
  return emb;
}

WordEmbeddings parse_glove_text(std::string_view text,
                                const WordSet* restrict_to) {
  std::istringstream in{std::string(text)};
  return parse_glove_text(in, restrict_to);
}

WordEmbeddings load_glove_text(const std::filesystem::path& path,
                               const WordSet* restrict_to) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open embeddings file " + path.string());
  return parse_glove_text(in, restrict_to);
}

WordSet read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open word list " + path.string());
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

WordEmbeddings synthetic_embeddings(std::span<const std::string> words,
                                    std::size_t dim, std::uint64_t seed,
                                    double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  WordEmbeddings emb(dim);
  std::vector<double> vec(dim);
  for (const auto& w : words) {
    if (emb.contains(w)) continue;
    for (double& v : vec) v = dist(rng);
    emb.insert(w, vec);
  }
  return emb;
}

}  // namespace tdtrnn
