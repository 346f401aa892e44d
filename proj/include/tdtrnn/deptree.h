#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdtrnn/tensor.h"

namespace tdtrnn {

// One word of a parsed sentence. `relation` labels the edge to the head;
// the root carries whatever DEPREL the input gave it (usually "root").
struct DepNode {
  std::size_t token;  // 1-based
  std::string form;
  std::size_t head;  // 0 for the root
  std::string relation;
  std::vector<std::size_t> children;  // ascending token order
};

// Rooted n-ary dependency tree over tokens 1..n. Immutable once built.
class DepTree {
 public:
  DepTree() = default;

  // Validates the head assignment and builds child lists. heads[i] is the
  // head of token i+1 (0 = root). Throws MalformedTreeError with the given
  // sentence ordinal on: zero or multiple roots, out-of-range head, cycles.
  static DepTree from_heads(std::vector<std::string> forms,
                            std::vector<std::size_t> heads,
                            std::vector<std::string> relations,
                            std::size_t sentence_ordinal = 0);

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::size_t root() const { return root_; }
  const DepNode& node(std::size_t token) const { return nodes_.at(token - 1); }
  std::span<const DepNode> nodes() const { return nodes_; }

  // Tokens ordered so that every child precedes its parent.
  const std::vector<std::size_t>& postorder() const { return postorder_; }

  bool operator==(const DepTree& other) const;

 private:
  std::vector<DepNode> nodes_;
  std::size_t root_ = 0;
  std::vector<std::size_t> postorder_;
};

// Number of words in the subtree rooted at `token`, the node itself included:
// l(t) = 1 + sum of l(k) over children k.
std::size_t leaf_count(const DepTree& tree, std::size_t token);

// leaf_count for every node at once, indexed by token - 1.
std::vector<std::size_t> subtree_sizes(const DepTree& tree);

// Signed sibling rank of `child` relative to `parent`: -j for the j-th
// nearest child on the left, +j on the right. Throws DataError if `child`
// is not a direct child of `parent`.
int child_offset(const DepTree& tree, std::size_t parent, std::size_t child);

// Dense label <-> index map. Index 0 is reserved for unknown labels. When
// coarse, labels are truncated at the first ':' ("nsubj:pass" -> "nsubj").
class RelationVocab {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::string_view kUnkLabel = "<unk>";

  explicit RelationVocab(bool coarse = false);

  static RelationVocab from_trees(std::span<const DepTree> trees,
                                  bool coarse = false);
  static RelationVocab from_labels(std::span<const std::string> labels,
                                   bool coarse = false);

  std::size_t add(std::string_view label);
  std::size_t index(std::string_view label) const;
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  std::size_t size() const { return labels_.size(); }
  bool coarse() const { return coarse_; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::string normalize(std::string_view label) const;

  bool operator==(const RelationVocab& other) const {
    return coarse_ == other.coarse_ && labels_ == other.labels_;
  }

 private:
  bool coarse_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

// The 47 relation types emitted by the Stanford parser in universal mode
// (UD v1 core labels plus its standard subtypes).
std::span<const std::string> universal_relations();

// One-hot encoding of `label` over the vocabulary (UNK for unseen labels).
Tensor one_hot(std::string_view label, const RelationVocab& vocab);
Tensor one_hot(std::size_t index, std::size_t size);

}  // namespace tdtrnn
