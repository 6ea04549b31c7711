#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace darts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Least-squares fit with the pieces the robust-variance sandwich needs.
// Rank-deficient designs are handled through the pseudoinverse and reported
// via `rank`; they are never an error.
struct OlsFit {
  Vector coefficients;  // minimum-norm solution, one per design column
  Vector residuals;     // y - X b
  Vector leverages;     // h_ii, each in [0, 1]
  Matrix gram_inverse;  // (X'X)^+
  int rank = 0;
};

// Moore-Penrose pseudoinverse by SVD. Singular values below
// tol * (largest singular value) are treated as zero.
Matrix pseudoinverse(const Matrix& m, double tol = 1e-12);

OlsFit ols_fit(const Matrix& design, const Vector& response);

struct Hc2 {
  double value = 0.0;
  // Set when an observation had leverage >= 1 - 1e-10 and its weight was
  // capped at resid^2 / 1e-10 instead of blowing up.
  bool leverage_capped = false;
};

// HC2 sandwich variance of one coefficient:
// [(X'X)^+ X' diag(e_i^2 / (1 - h_ii)) X (X'X)^+]_{kk}.
Hc2 hc2_variance(const OlsFit& fit, const Matrix& design, Eigen::Index coef_index);

struct PooledCov {
  Matrix cov;
  // Set when a group had fewer than two units and the whole-sample
  // covariance was used instead of the two-group pooling.
  bool whole_batch_fallback = false;
};

// Within-group pooled sample covariance ((n1-1) S1 + (n0-1) S0) / (n1+n0-2)
// for the binary grouping `assignment`.
PooledCov pooled_covariance(const Matrix& x, const std::vector<std::uint8_t>& assignment);

// Plain (n-1)-denominator sample covariance of the rows of x.
Matrix sample_covariance(const Matrix& x);

}  // namespace darts
