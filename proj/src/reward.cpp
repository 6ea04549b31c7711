#include "darts/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "darts/errors.hpp"

namespace darts {

namespace {

constexpr double kPathRatio = 1e-4;
constexpr int kPathLength = 100;
constexpr int kMaxSweeps = 10000;

struct Standardized {
  Matrix x;        // centered, unit population SD columns (excluded cols zeroed)
  Vector y;        // centered response
  Vector col_mean;
  Vector col_scale;  // population SD; 1.0 for excluded columns
  std::vector<bool> excluded;
  double y_mean = 0.0;
};

Standardized standardize(const Matrix& x, const Vector& y) {
  Standardized s;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  s.col_mean = x.colwise().mean();
  s.col_scale = Vector::Ones(p);
  s.excluded.assign(static_cast<std::size_t>(p), false);
  s.x = x.rowwise() - s.col_mean.transpose();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = s.x.col(j).squaredNorm() / static_cast<double>(n);
    if (var > 1e-24) {
      s.col_scale(j) = std::sqrt(var);
      s.x.col(j) /= s.col_scale(j);
    } else {
      s.excluded[static_cast<std::size_t>(j)] = true;
      s.x.col(j).setZero();
    }
  }
  s.y_mean = y.mean();
  s.y = y.array() - s.y_mean;
  return s;
}

// Covariance-update form of the problem: gram = X'X/n, xty = X'y/n on the
// standardized columns, so one coordinate update costs O(p) regardless of n.
struct GramProblem {
  Matrix gram;
  Vector xty;
  double tol = 1e-8;
};

GramProblem make_gram(const Standardized& s) {
  GramProblem gp;
  const double inv_n = 1.0 / static_cast<double>(s.x.rows());
  gp.gram = (s.x.transpose() * s.x) * inv_n;
  gp.xty = (s.x.transpose() * s.y) * inv_n;
  gp.tol = 1e-8 * std::max(1.0, std::sqrt(s.y.squaredNorm() * inv_n));
  return gp;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Cyclic coordinate descent with warm start; beta on the standardized scale
// and q = gram * beta maintained incrementally.
void cd_solve(const Standardized& s, const GramProblem& gp, double lambda, Vector& beta,
              Vector& q) {
  const Eigen::Index p = beta.size();

  auto sweep = [&](const std::vector<Eigen::Index>& cols) {
    double max_delta = 0.0;
    for (Eigen::Index j : cols) {
      if (s.excluded[static_cast<std::size_t>(j)]) continue;
      const double old = beta(j);
      const double z = gp.xty(j) - q(j) + old;  // unit-diagonal gram
      const double next = soft_threshold(z, lambda);
      if (next != old) {
        q += gp.gram.col(j) * (next - old);
        beta(j) = next;
        max_delta = std::max(max_delta, std::abs(next - old));
      }
    }
    return max_delta;
  };

  std::vector<Eigen::Index> all_cols(static_cast<std::size_t>(p));
  std::iota(all_cols.begin(), all_cols.end(), Eigen::Index{0});
  std::vector<Eigen::Index> active;

  for (int outer = 0; outer < kMaxSweeps; ++outer) {
    if (sweep(all_cols) < gp.tol) return;
    // Iterate the active set until stable, then re-verify on all columns.
    for (int inner = 0; inner < kMaxSweeps; ++inner) {
      active.clear();
      for (Eigen::Index j = 0; j < p; ++j) {
        if (beta(j) != 0.0) active.push_back(j);
      }
      if (active.empty() || sweep(active) < gp.tol) break;
    }
  }
}

std::vector<double> lambda_path(double lambda_max) {
  std::vector<double> path(static_cast<std::size_t>(kPathLength));
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * kPathRatio);
  for (int i = 0; i < kPathLength; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(kPathLength - 1);
    path[static_cast<std::size_t>(i)] = std::exp(log_max + f * (log_min - log_max));
  }
  return path;
}

double null_threshold(const GramProblem& gp, const Standardized& s) {
  double lmax = 0.0;
  for (Eigen::Index j = 0; j < gp.xty.size(); ++j) {
    if (s.excluded[static_cast<std::size_t>(j)]) continue;
    lmax = std::max(lmax, std::abs(gp.xty(j)));
  }
  return lmax;
}

LassoFit finish(const Standardized& s, const Vector& beta_std, double lambda) {
  LassoFit fit;
  fit.penalty = lambda;
  fit.coefficients = Vector::Zero(beta_std.size());
  for (Eigen::Index j = 0; j < beta_std.size(); ++j) {
    if (beta_std(j) != 0.0) {
      fit.coefficients(j) = beta_std(j) / s.col_scale(j);
      fit.selected_any = true;
    }
  }
  return fit;
}

}  // namespace

LassoFit lasso_at_penalty(const Matrix& x, const Vector& y, double penalty) {
  if (x.rows() != y.size()) throw InvalidInput("lasso: rows != response length");
  if (x.rows() < 1) throw InvalidInput("lasso: empty data");
  if (!(penalty >= 0.0)) throw InvalidInput("lasso: penalty must be non-negative");

  const Standardized s = standardize(x, y);
  const GramProblem gp = make_gram(s);
  Vector beta = Vector::Zero(x.cols());
  Vector q = Vector::Zero(x.cols());
  cd_solve(s, gp, penalty, beta, q);
  return finish(s, beta, penalty);
}

LassoFit lasso_cv(const Matrix& x, const Vector& y, int n_folds, Rng& rng) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n != y.size()) throw InvalidInput("lasso_cv: rows != response length");
  if (n_folds < 2) throw InvalidInput("lasso_cv: need at least 2 folds");
  if (n < n_folds) throw InvalidInput("lasso_cv: need at least n_folds rows");

  const Standardized full = standardize(x, y);
  const GramProblem full_gp = make_gram(full);
  const double lmax = null_threshold(full_gp, full);
  if (!(lmax > 1e-12)) {
    // Constant response (or all-constant columns): the null model.
    LassoFit fit;
    fit.coefficients = Vector::Zero(p);
    fit.penalty = 0.0;
    fit.selected_any = false;
    return fit;
  }
  const std::vector<double> path = lambda_path(lmax);

  // Units are shuffled once, then cut into contiguous folds.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  rng.shuffle(perm);

  std::vector<double> cv_err(path.size(), 0.0);
  for (int f = 0; f < n_folds; ++f) {
    const Eigen::Index lo = static_cast<Eigen::Index>(f) * n / n_folds;
    const Eigen::Index hi = static_cast<Eigen::Index>(f + 1) * n / n_folds;
    const Eigen::Index n_val = hi - lo;
    const Eigen::Index n_tr = n - n_val;

    Matrix x_tr(n_tr, p), x_val(n_val, p);
    Vector y_tr(n_tr), y_val(n_val);
    Eigen::Index it = 0;
    Eigen::Index iv = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = perm[static_cast<std::size_t>(i)];
      if (i >= lo && i < hi) {
        x_val.row(iv) = x.row(row);
        y_val(iv++) = y(row);
      } else {
        x_tr.row(it) = x.row(row);
        y_tr(it++) = y(row);
      }
    }

    const Standardized s = standardize(x_tr, y_tr);
    const GramProblem gp = make_gram(s);
    Vector beta = Vector::Zero(p);
    Vector q = Vector::Zero(p);
    Vector pred(n_val);
    for (std::size_t li = 0; li < path.size(); ++li) {
      cd_solve(s, gp, path[li], beta, q);  // warm start along the path
      // Validation error on the original scale.
      pred.setConstant(s.y_mean);
      for (Eigen::Index j = 0; j < p; ++j) {
        if (beta(j) == 0.0) continue;
        const double b = beta(j) / s.col_scale(j);
        pred += b * (x_val.col(j).array() - s.col_mean(j)).matrix();
      }
      cv_err[li] += (y_val - pred).squaredNorm();
    }
  }

  // lambda.min: smallest mean CV error, largest penalty on ties.
  std::size_t best = 0;
  for (std::size_t li = 1; li < path.size(); ++li) {
    if (cv_err[li] < cv_err[best]) best = li;
  }

  Vector beta = Vector::Zero(p);
  Vector q = Vector::Zero(p);
  for (std::size_t li = 0; li <= best; ++li) {
    cd_solve(full, full_gp, path[li], beta, q);
  }
  return finish(full, beta, path[best]);
}

std::vector<double> fractional_rewards(const LassoFit& fit, const SuperArm& chosen) {
  if (fit.coefficients.size() != static_cast<Eigen::Index>(chosen.indices.size())) {
    throw InvalidInput("fractional_rewards: fit must cover exactly the chosen arms");
  }
  std::vector<double> rewards(chosen.indices.size(), 0.0);
  if (!fit.selected_any) return rewards;
  const double max_abs = fit.coefficients.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    rewards[k] = std::abs(fit.coefficients(static_cast<Eigen::Index>(k))) / max_abs;
  }
  return rewards;
}

std::vector<double> binary_rewards(const LassoFit& fit, const SuperArm& chosen) {
  if (fit.coefficients.size() != static_cast<Eigen::Index>(chosen.indices.size())) {
    throw InvalidInput("binary_rewards: fit must cover exactly the chosen arms");
  }
  std::vector<double> rewards(chosen.indices.size(), 0.0);
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    rewards[k] = fit.coefficients(static_cast<Eigen::Index>(k)) != 0.0 ? 1.0 : 0.0;
  }
  return rewards;
}

}  // namespace darts
