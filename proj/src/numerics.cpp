#include "darts/numerics.hpp"

#include <cmath>

#include "darts/errors.hpp"

namespace darts {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

Matrix pseudoinverse(const Matrix& m, double tol) {
  if (!all_finite(m)) throw InvalidInput("pseudoinverse: non-finite input");
  if (m.rows() == 0 || m.cols() == 0) return Matrix::Zero(m.cols(), m.rows());

  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);

  Vector inv_sv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

OlsFit ols_fit(const Matrix& design, const Vector& response) {
  if (design.rows() != response.size()) {
    throw InvalidInput("ols_fit: design rows != response length");
  }
  if (design.rows() < 1) throw InvalidInput("ols_fit: empty design");

  OlsFit fit;
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  if (k == 0) {
    fit.coefficients = Vector::Zero(0);
    fit.residuals = response;
    fit.leverages = Vector::Zero(n);
    fit.gram_inverse = Matrix::Zero(0, 0);
    fit.rank = 0;
    return fit;
  }

  // One thin SVD gives the minimum-norm solution, (X'X)^+ and the hat
  // diagonal without forming X'X.
  Eigen::BDCSVD<Matrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = 1e-12 * (sv.size() > 0 ? sv(0) : 0.0);

  Vector inv_sv = Vector::Zero(sv.size());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      inv_sv(i) = 1.0 / sv(i);
      ++rank;
    }
  }

  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  fit.coefficients = v * (inv_sv.asDiagonal() * (u.transpose() * response));
  fit.residuals = response - design * fit.coefficients;
  fit.gram_inverse = v * inv_sv.array().square().matrix().asDiagonal() * v.transpose();
  fit.rank = rank;

  fit.leverages = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double h = 0.0;
    for (Eigen::Index j = 0; j < sv.size(); ++j) {
      if (inv_sv(j) > 0.0) h += u(i, j) * u(i, j);
    }
    fit.leverages(i) = h;
  }
  return fit;
}

Hc2 hc2_variance(const OlsFit& fit, const Matrix& design, Eigen::Index coef_index) {
  if (coef_index < 0 || coef_index >= fit.coefficients.size()) {
    throw InvalidInput("hc2_variance: coefficient index out of range");
  }
  Hc2 out;
  // a_i = (X (X'X)^+)_{i,k}; variance = sum_i a_i^2 * e_i^2 / (1 - h_i).
  const Vector a = design * fit.gram_inverse.col(coef_index);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    double denom = 1.0 - fit.leverages(i);
    if (denom < 1e-10) {
      denom = 1e-10;
      out.leverage_capped = true;
    }
    const double e = fit.residuals(i);
    acc += a(i) * a(i) * e * e / denom;
  }
  out.value = acc;
  return out;
}

Matrix sample_covariance(const Matrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n < 2) return Matrix::Zero(p, p);
  const Matrix centered = x.rowwise() - x.colwise().mean();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return 0.5 * (cov + cov.transpose());
}

PooledCov pooled_covariance(const Matrix& x, const std::vector<std::uint8_t>& assignment) {
  if (static_cast<Eigen::Index>(assignment.size()) != x.rows()) {
    throw InvalidInput("pooled_covariance: assignment length != rows");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  Eigen::Index n1 = 0;
  for (auto z : assignment) n1 += (z != 0);
  const Eigen::Index n0 = n - n1;

  PooledCov out;
  if (n1 < 2 || n0 < 2) {
    out.cov = sample_covariance(x);
    out.whole_batch_fallback = true;
    return out;
  }

  Matrix x1(n1, p);
  Matrix x0(n0, p);
  Eigen::Index i1 = 0;
  Eigen::Index i0 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (assignment[static_cast<std::size_t>(i)] != 0) {
      x1.row(i1++) = x.row(i);
    } else {
      x0.row(i0++) = x.row(i);
    }
  }
  const Matrix s1 = sample_covariance(x1);
  const Matrix s0 = sample_covariance(x0);
  out.cov = (static_cast<double>(n1 - 1) * s1 + static_cast<double>(n0 - 1) * s0) /
            static_cast<double>(n1 + n0 - 2);
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

}  // namespace darts
