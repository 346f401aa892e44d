#include "tdtrnn/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tdtrnn/error.h"

namespace tdtrnn {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t min_n,
                   const char* metric) {
  if (a != b) {
    throw UsageError(std::string(metric) + ": sequences differ in length (" +
                     std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  if (a < min_n) {
    throw UsageError(std::string(metric) + " needs at least " +
                     std::to_string(min_n) + " values");
  }
}

}  // namespace

double pearson(std::span<const double> predicted, std::span<const double> gold) {
  check_lengths(predicted.size(), gold.size(), 2, "pearson");
  const double n = static_cast<double>(predicted.size());
  const double mean_p =
      std::accumulate(predicted.begin(), predicted.end(), 0.0) / n;
  const double mean_g = std::accumulate(gold.begin(), gold.end(), 0.0) / n;
  double cov = 0.0, var_p = 0.0, var_g = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double dp = predicted[i] - mean_p;
    const double dg = gold[i] - mean_g;
    cov += dp * dg;
    var_p += dp * dp;
    var_g += dg * dg;
  }
  if (var_p == 0.0 || var_g == 0.0) {
    throw DegenerateInputError(
        "correlation undefined: constant sequence");
  }
  const double r = cov / std::sqrt(var_p * var_g);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> predicted, std::span<const double> gold) {
  check_lengths(predicted.size(), gold.size(), 2, "spearman");
  const auto rp = fractional_ranks(predicted);
  const auto rg = fractional_ranks(gold);
  return pearson(rp, rg);
}

double mse(std::span<const double> predicted, std::span<const double> gold) {
  check_lengths(predicted.size(), gold.size(), 1, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - gold[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predicted.size());
}

double accuracy(std::span<const std::size_t> predicted,
                std::span<const std::size_t> gold) {
  check_lengths(predicted.size(), gold.size(), 1, "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == gold[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace tdtrnn
