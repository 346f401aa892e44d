#include "tdtrnn/deptree.h"

#include <algorithm>
#include <array>

#include "tdtrnn/error.h"

namespace tdtrnn {

DepTree DepTree::from_heads(std::vector<std::string> forms,
                            std::vector<std::size_t> heads,
                            std::vector<std::string> relations,
                            std::size_t sentence_ordinal) {
  const std::size_t n = forms.size();
  if (heads.size() != n || relations.size() != n) {
    throw MalformedTreeError(sentence_ordinal,
                             "forms, heads and relations differ in length");
  }
  if (n == 0) throw MalformedTreeError(sentence_ordinal, "empty sentence");

  DepTree tree;
  tree.nodes_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] > n) {
      throw MalformedTreeError(sentence_ordinal,
                               "token " + std::to_string(i + 1) +
                                   " has head " + std::to_string(heads[i]) +
                                   " outside 0.." + std::to_string(n));
    }
    if (heads[i] == i + 1) {
      throw MalformedTreeError(sentence_ordinal,
                               "token " + std::to_string(i + 1) +
                                   " is its own head");
    }
    if (heads[i] == 0) {
      if (tree.root_ != 0) {
        throw MalformedTreeError(sentence_ordinal, "multiple roots");
      }
      tree.root_ = i + 1;
    }
    tree.nodes_.push_back(DepNode{.token = i + 1,
                                  .form = std::move(forms[i]),
                                  .head = heads[i],
                                  .relation = std::move(relations[i]),
                                  .children = {}});
  }
  if (tree.root_ == 0) throw MalformedTreeError(sentence_ordinal, "no root");

  // Every head chain must reach the root within n steps.
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on path, 2 reaches root
  for (std::size_t start = 1; start <= n; ++start) {
    std::vector<std::size_t> path;
    std::size_t t = start;
    while (t != 0 && state[t - 1] == 0) {
      state[t - 1] = 1;
      path.push_back(t);
      t = heads[t - 1];
    }
    if (t != 0 && state[t - 1] == 1) {
      throw MalformedTreeError(sentence_ordinal,
                               "head cycle through token " + std::to_string(t));
    }
    for (std::size_t p : path) state[p - 1] = 2;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] != 0) tree.nodes_[heads[i] - 1].children.push_back(i + 1);
  }

  // Iterative postorder: children (ascending) before parent.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{tree.root_, 0}};
  tree.postorder_.reserve(n);
  while (!stack.empty()) {
    auto& [token, next] = stack.back();
    const auto& kids = tree.nodes_[token - 1].children;
    if (next < kids.size()) {
      const std::size_t child = kids[next++];
      stack.emplace_back(child, 0);
    } else {
      tree.postorder_.push_back(token);
      stack.pop_back();
    }
  }
  return tree;
}

bool DepTree::operator==(const DepTree& other) const {
  if (root_ != other.root_ || nodes_.size() != other.nodes_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const DepNode& a = nodes_[i];
    const DepNode& b = other.nodes_[i];
    if (a.form != b.form || a.head != b.head || a.relation != b.relation ||
        a.children != b.children) {
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> subtree_sizes(const DepTree& tree) {
  std::vector<std::size_t> sizes(tree.size(), 1);
  for (std::size_t t : tree.postorder()) {
    for (std::size_t c : tree.node(t).children) sizes[t - 1] += sizes[c - 1];
  }
  return sizes;
}

std::size_t leaf_count(const DepTree& tree, std::size_t token) {
  std::size_t count = 1;
  for (std::size_t c : tree.node(token).children) count += leaf_count(tree, c);
  return count;
}

int child_offset(const DepTree& tree, std::size_t parent, std::size_t child) {
  const auto& kids = tree.node(parent).children;
  const auto it = std::find(kids.begin(), kids.end(), child);
  if (it == kids.end()) {
    throw DataError("token " + std::to_string(child) +
                    " is not a child of token " + std::to_string(parent));
  }
  // Children are sorted ascending, so siblings on the same side that lie
  // between child and parent are exactly the nearer ones.
  if (child < parent) {
    const auto nearer = std::count_if(kids.begin(), kids.end(), [&](auto k) {
      return k > child && k < parent;
    });
    return -static_cast<int>(nearer + 1);
  }
  const auto nearer = std::count_if(kids.begin(), kids.end(), [&](auto k) {
    return k < child && k > parent;
  });
  return static_cast<int>(nearer + 1);
}

RelationVocab::RelationVocab(bool coarse) : coarse_(coarse) {
  labels_.emplace_back(kUnkLabel);
  index_.emplace(std::string(kUnkLabel), kUnk);
}

std::string RelationVocab::normalize(std::string_view label) const {
  if (coarse_) {
    if (auto colon = label.find(':'); colon != std::string_view::npos) {
      label = label.substr(0, colon);
    }
  }
  return std::string(label);
}

std::size_t RelationVocab::add(std::string_view label) {
  std::string key = normalize(label);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const std::size_t id = labels_.size();
  labels_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::size_t RelationVocab::index(std::string_view label) const {
  auto it = index_.find(normalize(label));
  return it == index_.end() ? kUnk : it->second;
}

RelationVocab RelationVocab::from_trees(std::span<const DepTree> trees,
                                        bool coarse) {
  RelationVocab vocab(coarse);
  for (const DepTree& tree : trees) {
    for (const DepNode& node : tree.nodes()) {
      if (node.head != 0) vocab.add(node.relation);
    }
  }
  return vocab;
}

RelationVocab RelationVocab::from_labels(std::span<const std::string> labels,
                                         bool coarse) {
  RelationVocab vocab(coarse);
  for (const auto& l : labels) vocab.add(l);
  return vocab;
}

std::span<const std::string> universal_relations() {
  static const std::array<std::string, 47> kRelations = {
      "acl",        "acl:relcl",  "advcl",      "advmod",    "amod",
      "appos",      "aux",        "auxpass",    "case",      "cc",
      "cc:preconj", "ccomp",      "compound",   "compound:prt",
      "conj",       "cop",        "csubj",      "csubjpass", "dep",
      "det",        "det:predet", "discourse",  "dislocated", "dobj",
      "expl",       "foreign",    "goeswith",   "iobj",      "list",
      "mark",       "mwe",        "name",       "neg",       "nmod",
      "nmod:npmod", "nmod:poss",  "nmod:tmod",  "nsubj",     "nsubjpass",
      "nummod",     "parataxis",  "punct",      "remnant",   "reparandum",
      "root",       "vocative",   "xcomp"};
  return kRelations;
}

Tensor one_hot(std::size_t index, std::size_t size) {
  Tensor t = Tensor::zeros({size});
  t[index] = 1.0;
  return t;
}

Tensor one_hot(std::string_view label, const RelationVocab& vocab) {
  return one_hot(vocab.index(label), vocab.size());
}

}  // namespace tdtrnn
