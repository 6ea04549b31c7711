#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "darts/errors.hpp"
#include "darts/estimate.hpp"
#include "darts/rng.hpp"

using namespace darts;

namespace {

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace

TEST_CASE("difference in means, hand values") {
  Vector y(4);
  y << 3, 3, 1, 1;
  const Assignment z{{1, 1, 0, 0}};
  const BatchEstimate est = difference_in_means(y, z);
  CHECK(est.tau_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(est.degenerate);  // zero within-arm variance in both arms
}

TEST_CASE("constant outcomes give a flagged degenerate variance") {
  Vector y = Vector::Constant(4, 7.0);
  const Assignment z{{1, 1, 0, 0}};
  const BatchEstimate est = difference_in_means(y, z);
  CHECK(est.tau_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.v_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.degenerate);
}

TEST_CASE("Neyman variance, hand values") {
  Vector y(4);
  y << 1, 3, 0, 2;
  const Assignment z{{1, 1, 0, 0}};
  const BatchEstimate est = difference_in_means(y, z);
  CHECK(est.tau_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.v_hat == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Lin adjustment with no covariates reproduces difference in means") {
  Rng rng(3);
  const int n = 20;
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.normal();
  Assignment z{std::vector<std::uint8_t>(n, 0)};
  for (int i = 0; i < n / 2; ++i) z.z[static_cast<std::size_t>(i)] = 1;

  const BatchEstimate dim = difference_in_means(y, z);
  const BatchEstimate lin = lin_adjusted(y, z, Matrix(n, 0));
  CHECK(lin.tau_hat == doctest::Approx(dim.tau_hat).epsilon(1e-10));
  // HC2 on the [1, z] regression is exactly the Neyman variance.
  CHECK(lin.v_hat == doctest::Approx(dim.v_hat).epsilon(1e-8));
}

TEST_CASE("exact linear surface is recovered exactly") {
  const int n = 12;
  Matrix x(n, 1);
  Vector y(n);
  Assignment z{std::vector<std::uint8_t>(n, 0)};
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i;
    z.z[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i % 2);
    y(i) = 5.0 + 3.0 * i + 2.0 * (i % 2);
  }
  const BatchEstimate est = lin_adjusted(y, z, x);
  CHECK(est.tau_hat == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(est.v_hat <= 1e-12);
  CHECK(est.df_used == 4);
}

TEST_CASE("interacted regression equals the two-separate-regressions estimator") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 30;
    const int k = 3;
    const Matrix x = random_matrix(n, k, rng);
    Assignment z{std::vector<std::uint8_t>(n, 0)};
    for (int i = 0; i < n / 2; ++i) z.z[static_cast<std::size_t>(i)] = 1;
    Rng shuffle_rng(100 + static_cast<std::uint64_t>(rep));
    shuffle_rng.shuffle(z.z);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
      y(i) = x(i, 0) - 2.0 * x(i, 2) + 4.0 * z.z[static_cast<std::size_t>(i)] + rng.normal();
    }

    // Independent route: arm-specific OLS with an intercept, covariates
    // centered at the whole-batch mean, evaluated at the batch mean.
    const Eigen::RowVectorXd xbar = x.colwise().mean();
    double tau_arms[2] = {0.0, 0.0};
    for (int arm = 0; arm < 2; ++arm) {
      const int m = arm == 1 ? z.n_treated() : n - z.n_treated();
      Matrix design(m, k + 1);
      Vector resp(m);
      int r = 0;
      for (int i = 0; i < n; ++i) {
        if ((z.z[static_cast<std::size_t>(i)] != 0) != (arm == 1)) continue;
        design(r, 0) = 1.0;
        design.block(r, 1, 1, k) = x.row(i) - xbar;
        resp(r) = y(i);
        ++r;
      }
      const Vector beta =
          (design.transpose() * design).ldlt().solve(design.transpose() * resp);
      tau_arms[arm] = beta(0);  // fitted mean at the whole-batch covariate mean
    }
    const double tau_two_regressions = tau_arms[1] - tau_arms[0];

    const BatchEstimate est = lin_adjusted(y, z, x);
    CHECK(est.tau_hat == doctest::Approx(tau_two_regressions).epsilon(1e-8));
  }
}

TEST_CASE("saturated designs are flagged unstable but still return") {
  Rng rng(11);
  const int n = 6;
  const Matrix x = random_matrix(n, 4, rng);  // df_used = 10 >= n
  Vector y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.normal();
  const Assignment z{{1, 0, 1, 0, 1, 0}};
  const BatchEstimate est = lin_adjusted(y, z, x);
  CHECK(est.unstable);
  CHECK(std::isfinite(est.tau_hat));
}

TEST_CASE("pooling initializes from the first batch") {
  CumulativeEstimate cum;
  BatchEstimate b;
  b.tau_hat = 1.7;
  b.v_hat = 0.3;
  cum = pool(cum, b);
  CHECK(cum.mu_hat == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(cum.sigma2_hat == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(cum.batches_pooled == 1);
}

TEST_CASE("equal-precision batches average") {
  CumulativeEstimate cum;
  BatchEstimate b1, b2;
  b1.tau_hat = 1.0;
  b1.v_hat = 1.0;
  b2.tau_hat = 3.0;
  b2.v_hat = 1.0;
  cum = pool(pool(cum, b1), b2);
  CHECK(cum.mu_hat == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cum.sigma2_hat == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unequal-precision pooling, hand values") {
  CumulativeEstimate cum;
  BatchEstimate b1, b2;
  b1.tau_hat = 2.0;
  b1.v_hat = 1.0;
  b2.tau_hat = 4.0;
  b2.v_hat = 3.0;
  cum = pool(pool(cum, b1), b2);
  CHECK(cum.sigma2_hat == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(cum.mu_hat == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("degenerate batches are skipped without incrementing the count") {
  CumulativeEstimate cum;
  BatchEstimate good;
  good.tau_hat = 1.0;
  good.v_hat = 2.0;
  BatchEstimate bad;
  bad.tau_hat = 99.0;
  bad.v_hat = 0.0;
  cum = pool(pool(cum, good), bad);
  CHECK(cum.batches_pooled == 1);
  CHECK(cum.mu_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sequential pooling equals the closed-form IVW in any order") {
  Rng rng(13);
  std::vector<BatchEstimate> batches;
  for (int s = 0; s < 50; ++s) {
    BatchEstimate b;
    b.tau_hat = 4.0 + rng.normal();
    b.v_hat = 0.5 + 1.5 * rng.uniform();
    batches.push_back(b);
  }
  double sw = 0.0, swt = 0.0;
  for (const auto& b : batches) {
    sw += 1.0 / b.v_hat;
    swt += b.tau_hat / b.v_hat;
  }
  const double mu_closed = swt / sw;
  const double s2_closed = 1.0 / sw;

  for (int perm = 0; perm < 5; ++perm) {
    Rng shuffle_rng(200 + static_cast<std::uint64_t>(perm));
    std::vector<BatchEstimate> order = batches;
    if (perm > 0) shuffle_rng.shuffle(order);
    CumulativeEstimate cum;
    for (const auto& b : order) cum = pool(cum, b);
    CHECK(std::abs(cum.mu_hat - mu_closed) <= 1e-9 * std::abs(mu_closed));
    CHECK(std::abs(cum.sigma2_hat - s2_closed) <= 1e-9 * s2_closed);
    CHECK(cum.batches_pooled == 50);
  }
}

TEST_CASE("pooled variance is non-increasing in t") {
  Rng rng(17);
  CumulativeEstimate cum;
  double prev = std::numeric_limits<double>::infinity();
  for (int s = 0; s < 30; ++s) {
    BatchEstimate b;
    b.tau_hat = rng.normal();
    b.v_hat = 0.5 + rng.uniform();
    cum = pool(cum, b);
    CHECK(cum.sigma2_hat <= prev + 1e-15);
    prev = cum.sigma2_hat;
  }
}

TEST_CASE("normal quantile matches the 97.5% point") {
  CHECK(std::abs(normal_quantile(0.975) - 1.959964) < 1e-5);
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(normal_quantile(0.025) == doctest::Approx(-normal_quantile(0.975)).epsilon(1e-10));
}

TEST_CASE("Wald interval, hand values and width identity") {
  CumulativeEstimate cum;
  cum.mu_hat = 4.0;
  cum.sigma2_hat = 0.0001;
  cum.batches_pooled = 3;
  const WaldInterval w = wald_interval(cum, 0.95);
  CHECK(w.lo == doctest::Approx(3.9804).epsilon(1e-4));
  CHECK(w.hi == doctest::Approx(4.0196).epsilon(1e-4));
  CHECK_FALSE(w.degenerate);

  for (double level : {0.5, 0.8, 0.99}) {
    const WaldInterval wi = wald_interval(cum, level);
    const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    CHECK(wi.hi - wi.lo == doctest::Approx(2.0 * z * 0.01).epsilon(1e-10));
  }

  cum.sigma2_hat = 0.0;
  const WaldInterval point = wald_interval(cum, 0.95);
  CHECK(point.degenerate);
  CHECK(point.lo == doctest::Approx(point.hi).epsilon(1e-12));
  CHECK_THROWS_AS((void)wald_interval(cum, 1.5), InvalidInput);
}
