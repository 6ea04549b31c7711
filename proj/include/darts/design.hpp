#pragma once

#include <cstdint>
#include <vector>

#include "darts/numerics.hpp"
#include "darts/rng.hpp"

namespace darts {

// Half-half treatment assignment for one batch; z[i] = 1 means treated.
struct Assignment {
  std::vector<std::uint8_t> z;

  int size() const { return static_cast<int>(z.size()); }
  int n_treated() const {
    int s = 0;
    for (auto v : z) s += (v != 0);
    return s;
  }
  Assignment complement() const {
    Assignment out = *this;
    for (auto& v : out.z) v = static_cast<std::uint8_t>(v == 0 ? 1 : 0);
    return out;
  }
};

// Quadratic imbalance (Xbar_1 - Xbar_0)' S^+ (Xbar_1 - Xbar_0).
double mahalanobis_distance(const Matrix& x, const Assignment& z, const Matrix& sigma_pinv);

// Uniform draw over balanced assignments.
Assignment complete_randomization(int n, Rng& rng);

// Draws n_candidates balanced assignments, keeps the Mahalanobis minimizer
// (first drawn wins ties) under the whole-batch covariance pseudoinverse,
// then returns it or its mirror with probability 1/2 each.
Assignment rerandomize(const Matrix& x, int n_candidates, Rng& rng);

}  // namespace darts
