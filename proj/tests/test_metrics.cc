#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.h"
#include "tdtrnn/error.h"
#include "tdtrnn/metrics.h"
#include "test_util.h"

using namespace tdtrnn;

TEST_SUITE("eval") {

TEST_CASE("pearson examples") {
  const std::vector<double> g{1, 2.5, 3, 4.75, 2};
  CHECK(pearson(g, g) == doctest::Approx(1.0).epsilon(1e-14));
  std::vector<double> neg(g);
  for (double& x : neg) x = -x;
  CHECK(pearson(neg, g) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("pearson errors") {
  const std::vector<double> a{1, 2, 3}, c{2, 2, 2}, shorter{1, 2};
  CHECK_THROWS_AS((void)pearson(c, a), DegenerateInputError);
  CHECK_THROWS_AS((void)pearson(a, c), DegenerateInputError);
  CHECK_THROWS_AS((void)pearson(a, shorter), UsageError);
  CHECK_THROWS_AS((void)pearson(std::vector<double>{1}, std::vector<double>{1}),
                  UsageError);
  CHECK_THROWS_AS((void)spearman(c, a), DegenerateInputError);
}

TEST_CASE("spearman examples") {
  const std::vector<double> g{0.5, 2, -1, 7, 3.25};
  std::vector<double> cubed(g), rev(g);
  for (double& x : cubed) x = x * x * x + 4;
  for (double& x : rev) x = -std::exp(x);
  CHECK(spearman(cubed, g) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(spearman(rev, g) == doctest::Approx(-1.0).epsilon(1e-14));

  // Ranks of x: 1, 2.5, 2.5, 4 against y ranks 1, 2, 3, 4.
  const std::vector<double> x{1, 2, 2, 3}, y{1, 2, 3, 4};
  CHECK(std::fabs(spearman(x, y) - 3.0 / std::sqrt(10.0)) < 1e-12);
  const auto r = fractional_ranks(x);
  CHECK(r == std::vector<double>{1, 2.5, 2.5, 4});
}

TEST_CASE("mse and accuracy examples") {
  const std::vector<double> a{1, 2, 3};
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(std::vector<double>{2, 3, 4}, a) == 1.0);
  const std::vector<std::size_t> l{0, 1, 2, 1};
  CHECK(accuracy(l, l) == 1.0);
  CHECK(accuracy(std::vector<std::size_t>{1, 2, 0, 0}, l) == 0.0);
  CHECK(accuracy(std::vector<std::size_t>{0, 1, 0, 0}, l) == 0.5);
  CHECK_THROWS_AS((void)accuracy(std::vector<std::size_t>{}, std::vector<std::size_t>{}),
                  UsageError);
}

TEST_CASE("metrics match direct-formula oracles") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial;
    auto x = random_vector(rng, n, 1, 5), y = random_vector(rng, n, 1, 5);
    if (trial % 2 == 0) {
      for (double& v : x) v = std::round(v);
      for (double& v : y) v = std::round(v * 2) / 2;
      x[0] = 1;
      x[1] = 5;
      y[0] = 1;
      y[1] = 5;
    }
    CHECK(std::fabs(pearson(x, y) - oracle::pearson(x, y)) < 1e-12);
    CHECK(std::fabs(spearman(x, y) - oracle::spearman(x, y)) < 1e-12);
    CHECK(std::fabs(mse(x, y) - oracle::mse(x, y)) < 1e-12);
    const auto r = fractional_ranks(x);
    const auto ro = oracle::average_ranks(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(r[i] == ro[i]);
    std::vector<std::size_t> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<std::size_t>(x[i]) % 3;
      b[i] = static_cast<std::size_t>(y[i]) % 3;
    }
    CHECK(std::fabs(accuracy(a, b) - oracle::accuracy(a, b)) < 1e-12);
  }
}

TEST_CASE("ranges and transform invariance") {
  std::mt19937_64 rng(137);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_vector(rng, 12), y = random_vector(rng, 12);
    const double p = pearson(x, y), s = spearman(x, y);
    CHECK(std::fabs(p) <= 1.0);
    CHECK(std::fabs(s) <= 1.0);
    CHECK(mse(x, y) >= 0.0);
    std::vector<double> affine(x), mono(x);
    for (double& v : affine) v = 3.5 * v - 2;
    for (double& v : mono) v = std::exp(3 * v);
    CHECK(std::fabs(pearson(affine, y) - p) < 1e-12);
    CHECK(std::fabs(spearman(mono, y) - s) < 1e-12);
  }
}

}  // TEST_SUITE
