#pragma once

#include <vector>

#include "darts/bandit.hpp"
#include "darts/numerics.hpp"
#include "darts/rng.hpp"

namespace darts {

struct LassoFit {
  Vector coefficients;      // original column scale; zeros are exact
  double penalty = 0.0;     // chosen lambda (standardized scale)
  bool selected_any = false;
};

// l1-penalized least squares, objective (1/2n)||y - b0 - X b||^2 + lambda |b|_1
// solved by cyclic coordinate descent on columns standardized to unit
// (population) SD, with an intercept. Coefficients return on the original
// scale. Constant columns are excluded and get exact zero.
LassoFit lasso_at_penalty(const Matrix& x, const Vector& y, double penalty);

// Penalty path of 100 log-spaced values from the null-model threshold
// max_j |x_j' y_c| / n down to 1e-4 of it; the penalty minimizing mean
// n_folds-fold cross-validated squared error (lambda.min) is kept and the
// model refit on all rows at that penalty.
LassoFit lasso_cv(const Matrix& x, const Vector& y, int n_folds, Rng& rng);

// r_j = |coef_j| / max_k |coef_k|, all zero when nothing was selected.
std::vector<double> fractional_rewards(const LassoFit& fit, const SuperArm& chosen);

// r_j = 1 iff coef_j != 0.
std::vector<double> binary_rewards(const LassoFit& fit, const SuperArm& chosen);

}  // namespace darts
