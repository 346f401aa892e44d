#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tdtrnn/tensor.h"

namespace tdtrnn {

using WordSet = std::unordered_set<std::string>;

// Word -> row index.
class WordVocab {
 public:
  std::optional<std::size_t> find(std::string_view word) const;
  // Returns the existing row for duplicates.
  std::size_t add(std::string word);
  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t row) const { return words_.at(row); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> rows_;
};

// Fixed pre-trained word vectors. Never updated by training.
class WordEmbeddings {
 public:
  WordEmbeddings() = default;
  explicit WordEmbeddings(std::size_t dim) : dim_(dim), oov_(dim, 0.0) {}

  // Appends a row; returns false (and keeps the first vector) for duplicates.
  bool insert(std::string word, std::span<const double> vector);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const WordVocab& vocab() const { return vocab_; }
  bool contains(std::string_view word) const {
    return vocab_.find(word).has_value();
  }

  // Exact match, then lowercase match, then the all-zero OOV vector.
  std::span<const double> row(std::string_view word) const;
  Tensor lookup(std::string_view word) const;

 private:
  std::size_t dim_ = 0;
  WordVocab vocab_;
  std::vector<double> table_;
  std::vector<double> oov_;
};

// Reads "word v1 ... vd" lines. Keeps only words in restrict_to when given.
// Throws FormatError (with line number) on inconsistent dimension or an
// unparseable number; UsageError if the file cannot be opened.
WordEmbeddings load_glove_text(const std::filesystem::path& path,
                               const WordSet* restrict_to = nullptr);
WordEmbeddings parse_glove_text(std::istream& in,
                                const WordSet* restrict_to = nullptr);
WordEmbeddings parse_glove_text(std::string_view text,
                                const WordSet* restrict_to = nullptr);

// One word per line; blank lines ignored.
WordSet read_word_list(const std::filesystem::path& path);

// Seeded uniform vectors in [-scale, scale] for tests and synthetic data.
WordEmbeddings synthetic_embeddings(std::span<const std::string> words,
                                    std::size_t dim, std::uint64_t seed,
                                    double scale = 0.05);

std::string to_lower_ascii(std::string_view s);

}  // namespace tdtrnn
