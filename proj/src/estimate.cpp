#include "darts/estimate.hpp"

#include <cmath>

#include "darts/errors.hpp"

namespace darts {

namespace {

// Acklam's rational approximation, then two Halley steps through erfc.
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double sqrt2pi = 2.5066282746310005024;
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * sqrt2pi * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double sample_variance(const Vector& v) {
  const Eigen::Index n = v.size();
  if (n < 2) return 0.0;
  const double mean = v.mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = v(i) - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(n - 1);
}

}  // namespace

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw InvalidInput("normal_quantile: prob must be in (0,1)");
  return inverse_normal_cdf(prob);
}

BatchEstimate difference_in_means(const Vector& y, const Assignment& z) {
  if (z.size() != static_cast<int>(y.size())) {
    throw InvalidInput("difference_in_means: assignment length != outcomes");
  }
  const int n = z.size();
  const int n1 = z.n_treated();
  const int n0 = n - n1;
  if (n1 == 0 || n0 == 0) throw InvalidInput("difference_in_means: both arms must be non-empty");

  Vector y1(n1);
  Vector y0(n0);
  int i1 = 0;
  int i0 = 0;
  for (int i = 0; i < n; ++i) {
    if (z.z[static_cast<std::size_t>(i)] != 0) {
      y1(i1++) = y(i);
    } else {
      y0(i0++) = y(i);
    }
  }

  BatchEstimate est;
  est.method = EstimatorKind::DiM;
  est.df_used = 2;
  est.tau_hat = y1.mean() - y0.mean();
  const double s1 = sample_variance(y1);
  const double s0 = sample_variance(y0);
  est.v_hat = s1 / n1 + s0 / n0;
  est.degenerate = (est.v_hat <= 0.0);
  return est;
}

BatchEstimate lin_adjusted(const Vector& y, const Assignment& z, const Matrix& x) {
  if (z.size() != static_cast<int>(y.size())) {
    throw InvalidInput("lin_adjusted: assignment length != outcomes");
  }
  if (x.rows() != y.size()) throw InvalidInput("lin_adjusted: covariate rows != outcomes");

  const Eigen::Index n = y.size();
  const Eigen::Index k = x.cols();

  Matrix design(n, 2 * k + 2);
  design.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 1) = z.z[static_cast<std::size_t>(i)] != 0 ? 1.0 : 0.0;
  }
  if (k > 0) {
    const Matrix centered = x.rowwise() - x.colwise().mean();
    design.block(0, 2, n, k) = centered;
    design.block(0, 2 + k, n, k) = centered.array().colwise() * design.col(1).array();
  }

  const OlsFit fit = ols_fit(design, y);
  const Hc2 v = hc2_variance(fit, design, 1);

  BatchEstimate est;
  est.method = EstimatorKind::LinAdjusted;
  est.df_used = static_cast<int>(2 * k + 2);
  est.tau_hat = fit.coefficients(1);
  est.v_hat = v.value;
  est.leverage_capped = v.leverage_capped;
  est.rank_deficient = fit.rank < design.cols();
  est.unstable = est.df_used >= static_cast<int>(n);
  est.degenerate = (est.v_hat <= 0.0);
  return est;
}

CumulativeEstimate pool(const CumulativeEstimate& prev, const BatchEstimate& batch) {
  if (!(batch.v_hat > 0.0)) return prev;  // skipped, count not incremented
  CumulativeEstimate out;
  if (prev.batches_pooled == 0) {
    out.mu_hat = batch.tau_hat;
    out.sigma2_hat = batch.v_hat;
    out.batches_pooled = 1;
    return out;
  }
  out.sigma2_hat = 1.0 / (1.0 / prev.sigma2_hat + 1.0 / batch.v_hat);
  out.mu_hat = out.sigma2_hat * (prev.mu_hat / prev.sigma2_hat + batch.tau_hat / batch.v_hat);
  out.batches_pooled = prev.batches_pooled + 1;
  return out;
}

WaldInterval wald_interval(const CumulativeEstimate& c, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("wald_interval: level must be in (0,1)");
  const double zq = normal_quantile(1.0 - (1.0 - level) / 2.0);
  const double se = c.sigma2_hat > 0.0 ? std::sqrt(c.sigma2_hat) : 0.0;
  WaldInterval w;
  w.lo = c.mu_hat - zq * se;
  w.hi = c.mu_hat + zq * se;
  w.degenerate = !(c.sigma2_hat > 0.0);
  return w;
}

}  // namespace darts
