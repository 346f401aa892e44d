// Straight-line reference implementations used as test oracles. Nothing here
// goes through Graph; trees are walked recursively from the head array and
// every product is an explicit loop. Templated on the scalar type so the
// finite-difference check can run in extended precision.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tdtrnn/model.h"

namespace oracle {

using tdtrnn::Activation;
using tdtrnn::DepTree;
using tdtrnn::Tensor;

// Children of `parent` found by scanning heads, not the tree's child lists.
inline std::vector<std::size_t> children_by_scan(const DepTree& tree,
                                                 std::size_t parent) {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= tree.size(); ++t) {
    if (tree.node(t).head == parent) out.push_back(t);
  }
  return out;
}

inline std::size_t words_below(const DepTree& tree, std::size_t t) {
  std::size_t n = 1;
  for (std::size_t k : children_by_scan(tree, t)) n += words_below(tree, k);
  return n;
}

// -j for the j-th nearest left child, +j for the j-th nearest right child.
inline int signed_offset(const DepTree& tree, std::size_t parent,
                         std::size_t child) {
  std::vector<std::size_t> same_side;
  for (std::size_t k : children_by_scan(tree, parent)) {
    if ((k < parent) == (child < parent)) same_side.push_back(k);
  }
  auto distance = [&](std::size_t k) {
    return k < parent ? parent - k : k - parent;
  };
  std::sort(same_side.begin(), same_side.end(),
            [&](std::size_t x, std::size_t y) { return distance(x) < distance(y); });
  const auto pos = std::find(same_side.begin(), same_side.end(), child) -
                   same_side.begin();
  const int j = static_cast<int>(pos) + 1;
  return child < parent ? -j : j;
}

template <typename T>
struct PairOracle {
  tdtrnn::Model& model;
  const tdtrnn::WordEmbeddings& words;
  // Optional single-entry perturbation, applied in T.
  const Tensor* bumped = nullptr;
  std::size_t bumped_index = 0;
  T delta = 0;

  T w(const Tensor& t, std::size_t k) const {
    T v = static_cast<T>(t.values()[k]);
    if (&t == bumped && k == bumped_index) v += delta;
    return v;
  }

  std::vector<T> matvec(const Tensor& m, const std::vector<T>& x) const {
    const std::size_t rows = m.rows(), cols = m.cols();
    std::vector<T> y(rows, T(0));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) y[i] += w(m, i * cols + j) * x[j];
    }
    return y;
  }

  std::vector<T> plus_bias(std::vector<T> x, const Tensor& b) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += w(b, i);
    return x;
  }

  static std::vector<T> apply(std::vector<T> x, Activation a) {
    for (T& v : x) {
      if (a == Activation::kTanh) {
        v = std::tanh(v);
      } else {
        v = v > T(0) ? v : T(0);
      }
    }
    return x;
  }

  std::vector<T> word(const std::string& form) const {
    const auto row = words.row(form);
    return std::vector<T>(row.begin(), row.end());
  }

  std::vector<T> child_term(const DepTree& tree, std::size_t parent,
                            std::size_t child, const std::vector<T>& h) const {
    const auto& enc = model.encoder;
    const std::string& rel = tree.node(child).relation;
    if (const auto* p = std::get_if<tdtrnn::TypedParams>(&enc)) {
      const std::size_t idx = model.relations.index(rel);
      std::vector<T> z(model.relations.size(), T(0));
      z[idx] = T(1);
      std::vector<T> d = apply(plus_bias(matvec(p->dep_proj, z), p->dep_bias),
                               model.config.activations.dep);
      std::vector<T> hd = h;
      hd.insert(hd.end(), d.begin(), d.end());
      return matvec(p->child_proj, hd);
    }
    if (const auto* p = std::get_if<tdtrnn::PositionalParams>(&enc)) {
      const int off = signed_offset(tree, parent, child);
      const std::size_t j = std::min<std::size_t>(
          static_cast<std::size_t>(std::abs(off)), p->left.size());
      return matvec(off < 0 ? p->left[j - 1] : p->right[j - 1], h);
    }
    if (const auto* p = std::get_if<tdtrnn::RelationalParams>(&enc)) {
      return matvec(p->by_relation[model.relations.index(rel)], h);
    }
    const auto& p = std::get<tdtrnn::SingleParams>(enc);
    return matvec(p.child_proj, h);
  }

  const Tensor& word_proj() const {
    return std::visit([](const auto& p) -> const Tensor& { return p.word_proj; },
                      model.encoder);
  }

  std::vector<T> hidden(const DepTree& tree, std::size_t t) const {
    std::vector<T> acc = matvec(word_proj(), word(tree.node(t).form));
    for (std::size_t k : children_by_scan(tree, t)) {
      const std::vector<T> term = child_term(tree, t, k, hidden(tree, k));
      const T lk = static_cast<T>(words_below(tree, k));
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += lk * term[i];
    }
    const T lt = static_cast<T>(words_below(tree, t));
    for (T& v : acc) v /= lt;
    return apply(acc, model.config.activations.node);
  }

  std::vector<T> encode(const DepTree& tree) const {
    std::size_t root = 0;
    for (std::size_t t = 1; t <= tree.size(); ++t) {
      if (tree.node(t).head == 0) root = t;
    }
    return hidden(tree, root);
  }

  std::vector<T> head(const std::vector<T>& u, const std::vector<T>& v) const {
    std::vector<T> feat;
    for (std::size_t i = 0; i < u.size(); ++i) feat.push_back(u[i] * v[i]);
    for (std::size_t i = 0; i < u.size(); ++i) feat.push_back(std::fabs(u[i] - v[i]));
    const auto& hp = model.head;
    const std::vector<T> hs =
        apply(plus_bias(matvec(hp.hidden_proj, feat), hp.hidden_bias),
              Activation::kTanh);
    const std::vector<T> logits = plus_bias(matvec(hp.out_proj, hs), hp.out_bias);
    // Plain exp / sum, no max shift.
    std::vector<T> p(logits.size());
    T total = 0;
    for (std::size_t i = 0; i < p.size(); ++i) total += (p[i] = std::exp(logits[i]));
    for (T& x : p) x /= total;
    return p;
  }

  std::vector<T> distribution(const DepTree& a, const DepTree& b) const {
    return head(encode(a), encode(b));
  }

  T loss(const DepTree& a, const DepTree& b, std::span<const double> target) const {
    const std::vector<T> q = distribution(a, b);
    T kl = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (target[i] > 0.0) {
        const T p = static_cast<T>(target[i]);
        kl += p * (std::log(p) - std::log(q[i]));
      }
    }
    return kl;
  }
};

struct FdEntry {
  std::string name;
  double max_rel_error = 0.0;
};

struct FdReport {
  std::vector<FdEntry> entries;
  double max_rel_error = 0.0;
};

// Central differences of the oracle loss in T, compared against analytic.
template <typename T>
FdReport central_differences(tdtrnn::Model& model,
                             const tdtrnn::WordEmbeddings& words,
                             const DepTree& a, const DepTree& b,
                             std::span<const double> target,
                             std::span<const tdtrnn::NamedParam> params,
                             const std::vector<std::vector<double>>& analytic,
                             T step) {
  FdReport report;
  PairOracle<T> o{model, words};
  for (std::size_t p = 0; p < params.size(); ++p) {
    FdEntry entry{params[p].name};
    const Tensor& t = *params[p].tensor;
    for (std::size_t k = 0; k < t.size(); ++k) {
      o.bumped = &t;
      o.bumped_index = k;
      o.delta = step;
      const T up = o.loss(a, b, target);
      o.delta = -step;
      const T down = o.loss(a, b, target);
      const double numeric = static_cast<double>((up - down) / (T(2) * step));
      const double an = analytic[p][k];
      const double denom = std::max({std::fabs(an), std::fabs(numeric), 1e-8});
      entry.max_rel_error = std::max(entry.max_rel_error, std::fabs(an - numeric) / denom);
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(entry);
  }
  return report;
}

// Direct-formula statistics.
inline double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Rank of x[i] = 1 + #{j : x[j] < x[i]} + (#{j != i : x[j] == x[i]}) / 2.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < x[i]) ++less;
      if (j != i && x[j] == x[i]) ++equal;
    }
    r[i] = 1.0 + less + equal / 2.0;
  }
  return r;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x), ry = average_ranks(y);
  return pearson(rx, ry);
}

inline double mse(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

inline double accuracy(std::span<const std::size_t> x, std::span<const std::size_t> y) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) hits += x[i] == y[i];
  return static_cast<double>(hits) / static_cast<double>(x.size());
}

}  // namespace oracle
