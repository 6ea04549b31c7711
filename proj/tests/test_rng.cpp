#include <doctest.h>

#include <cmath>
#include <set>

#include "darts/rng.hpp"

using namespace darts;

TEST_CASE("uniform draws live in [0,1) with the right mean") {
  Rng rng(43);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal sampler has standard moments") {
  Rng rng(7);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s1 += x;
    s2 += x * x;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("gamma sampler matches mean and variance") {
  for (double shape : {0.4, 1.0, 3.5, 20.0}) {
    Rng rng(11);
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.gamma(shape);
      s1 += x;
      s2 += x * x;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::abs(mean - shape) < 0.05 * std::max(1.0, shape));
    CHECK(std::abs(var - shape) < 0.08 * std::max(1.0, shape));
  }
}

TEST_CASE("derived streams are reproducible and stage-separated") {
  const std::uint64_t a = derive_stream(5, 3, Stage::kDgp);
  const std::uint64_t b = derive_stream(5, 3, Stage::kDgp);
  const std::uint64_t c = derive_stream(5, 3, Stage::kAssignment);
  const std::uint64_t d = derive_stream(5, 4, Stage::kDgp);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a != d);
}

TEST_CASE("bounded draws are unbiased over small ranges") {
  Rng rng(99);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(rng.below(5))]++;
  for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 0.2) < 0.01);
}

TEST_CASE("shuffle produces all permutations of a small vector") {
  Rng rng(123);
  std::set<std::vector<int>> seen;
  for (int rep = 0; rep < 2000; ++rep) {
    std::vector<int> v{0, 1, 2};
    rng.shuffle(v);
    seen.insert(v);
  }
  CHECK(seen.size() == 6);
}
