#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tdtrnn {

// Sample Pearson correlation. Throws UsageError on length mismatch or n < 2,
// DegenerateInputError when either sequence is constant.
double pearson(std::span<const double> predicted, std::span<const double> gold);

// Pearson correlation of fractional ranks (ties share their average rank).
double spearman(std::span<const double> predicted, std::span<const double> gold);

double mse(std::span<const double> predicted, std::span<const double> gold);

double accuracy(std::span<const std::size_t> predicted,
                std::span<const std::size_t> gold);

// 1-based ranks; tied values receive the mean of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> values);

}  // namespace tdtrnn
