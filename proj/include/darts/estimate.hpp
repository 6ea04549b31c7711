#pragma once

#include "darts/design.hpp"
#include "darts/numerics.hpp"

namespace darts {

enum class EstimatorKind { DiM, LinAdjusted };

struct BatchEstimate {
  double tau_hat = 0.0;
  double v_hat = 0.0;
  EstimatorKind method = EstimatorKind::DiM;
  int df_used = 0;
  bool degenerate = false;      // v_hat collapsed to zero (exact fit / constant y)
  bool rank_deficient = false;  // design handled through the pseudoinverse
  bool unstable = false;        // df_used >= n; estimate returned anyway
  bool leverage_capped = false;
};

// Treated-minus-control mean with the Neyman variance s1^2/N1 + s0^2/N0.
BatchEstimate difference_in_means(const Vector& y, const Assignment& z);

// Interacted regression of y on [1, z, x_c, z * x_c] with columns centered at
// the whole-batch mean; tau is the z coefficient, v its HC2 variance.
BatchEstimate lin_adjusted(const Vector& y, const Assignment& z, const Matrix& x);

struct CumulativeEstimate {
  double mu_hat = 0.0;
  double sigma2_hat = 0.0;  // meaningful once batches_pooled >= 1
  int batches_pooled = 0;
};

// Inverse-variance update. The first pooled batch initializes the state;
// batches with v_hat <= 0 are skipped and the count is not incremented.
CumulativeEstimate pool(const CumulativeEstimate& prev, const BatchEstimate& batch);

struct WaldInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate = false;  // zero-width interval from sigma2 = 0
};

WaldInterval wald_interval(const CumulativeEstimate& c, double level);

// Standard normal quantile, accurate to ~1e-13.
double normal_quantile(double prob);

}  // namespace darts
