#include "darts/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "darts/errors.hpp"

namespace darts {

namespace {

constexpr int kSignalArms = 20;
constexpr double kPi = 3.14159265358979323846;

void require_signal_room(int p, const char* where) {
  if (p < kSignalArms) {
    throw InvalidInput(std::string(where) + ": need at least 20 covariates");
  }
}

// Raw shared-effect covariates plus their [0,1]-scaled and centered versions.
struct LiangCovariates {
  Matrix scaled01;  // per-column (x - min) / (max - min)
  Matrix centered;  // scaled01 minus the batch column mean
};

LiangCovariates draw_liang_covariates(int n, int p, Rng& rng) {
  Matrix raw(n, p);
  Vector shared(n);
  for (int i = 0; i < n; ++i) shared(i) = rng.normal();
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) {
      raw(i, j) = 0.5 * (shared(i) + rng.normal());
    }
  }
  LiangCovariates cov;
  cov.scaled01 = raw;
  for (int j = 0; j < p; ++j) {
    const double lo = raw.col(j).minCoeff();
    const double hi = raw.col(j).maxCoeff();
    if (hi > lo) {
      cov.scaled01.col(j) = (raw.col(j).array() - lo) / (hi - lo);
    } else {
      cov.scaled01.col(j).setConstant(0.5);
    }
  }
  cov.centered = cov.scaled01.rowwise() - cov.scaled01.colwise().mean();
  return cov;
}

Vector liang_baseline(const Matrix& x, const Vector& beta, double noise_sd, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  Vector y0 = x * beta;
  for (int i = 0; i < n; ++i) {
    y0(i) += 10.0 * x(i, 1) / (1.0 + x(i, 0) * x(i, 0)) + 5.0 * std::sin(x(i, 2) - x(i, 3)) +
             2.0 * x(i, 4);
  }
  for (int i = 0; i < n; ++i) y0(i) += noise_sd * rng.normal();
  return y0;
}

}  // namespace

Vector draw_beta_coefficients(int p, Rng& rng, BetaScale scale) {
  require_signal_room(p, "draw_beta_coefficients");
  auto sd = [scale](double v) {
    return scale == BetaScale::Variance ? std::sqrt(v) : v;
  };
  Vector beta(p);
  for (int j = 0; j < p; ++j) {
    if (j < 10) {
      beta(j) = 2.0 + sd(0.1) * rng.normal();
    } else if (j < kSignalArms) {
      beta(j) = -2.0 + sd(0.05) * rng.normal();
    } else {
      beta(j) = sd(0.01) * rng.normal();
    }
  }
  return beta;
}

OutcomeSurface make_surface(DgpKind kind, int p, Rng& rng, BetaScale scale, double tau,
                            double noise_sd) {
  OutcomeSurface s;
  s.kind = kind;
  s.beta = draw_beta_coefficients(p, rng, scale);
  s.tau = tau;
  s.noise_sd = noise_sd;
  return s;
}

Batch gen_linear_batch(const OutcomeSurface& surface, int n, int p, Rng& rng) {
  require_signal_room(p, "gen_linear_batch");
  if (n < 1) throw InvalidInput("gen_linear_batch: empty batch");
  if (surface.beta.size() != p) throw InvalidInput("gen_linear_batch: beta length != p");

  Batch b;
  b.x = Matrix(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) b.x(i, j) = rng.normal();
  }
  b.y0 = b.x * surface.beta;
  for (int i = 0; i < n; ++i) {
    b.y0(i) += 2.0 * b.x(i, 0) * b.x(i, 4) + surface.noise_sd * rng.normal();
  }
  b.y1 = b.y0.array() + surface.tau;
  return b;
}

Batch gen_liang_batch(const OutcomeSurface& surface, int n, int p, Rng& rng) {
  require_signal_room(p, "gen_liang_batch");
  if (n < 1) throw InvalidInput("gen_liang_batch: empty batch");
  if (surface.beta.size() != p) throw InvalidInput("gen_liang_batch: beta length != p");

  const LiangCovariates cov = draw_liang_covariates(n, p, rng);
  Batch b;
  b.x = cov.centered;
  b.y0 = liang_baseline(b.x, surface.beta, surface.noise_sd, rng);
  b.y1 = b.y0.array() + surface.tau;
  return b;
}

Batch gen_hetero_te_batch(const OutcomeSurface& surface, int n, int p, Rng& rng) {
  require_signal_room(p, "gen_hetero_te_batch");
  if (n < 1) throw InvalidInput("gen_hetero_te_batch: empty batch");
  if (surface.beta.size() != p) throw InvalidInput("gen_hetero_te_batch: beta length != p");

  const LiangCovariates cov = draw_liang_covariates(n, p, rng);
  Batch b;
  b.x = cov.centered;
  b.y0 = liang_baseline(b.x, surface.beta, surface.noise_sd, rng);
  b.y1 = b.y0;
  // Friedman-style effect on the [0,1] covariate scale (columns 6-10).
  const Matrix& u = cov.scaled01;
  for (int i = 0; i < n; ++i) {
    const double tau_i = 2.0 + 3.0 * std::sin(kPi * u(i, 5) * u(i, 6)) +
                         4.0 * (u(i, 7) - 0.5) * (u(i, 7) - 0.5) + 2.0 * u(i, 8) + u(i, 9);
    b.y1(i) += tau_i;
  }
  return b;
}

CostDraw make_costs(CostKind kind, int p, Rng& rng) {
  if (p < 1) throw InvalidInput("make_costs: need at least one covariate");
  CostDraw out;
  out.costs.resize(static_cast<std::size_t>(p));
  switch (kind) {
    case CostKind::Equal:
      std::fill(out.costs.begin(), out.costs.end(), 1.0);
      return out;
    case CostKind::UniformRandom: {
      for (double& c : out.costs) c = std::max(2.0 * rng.uniform(), 1e-6);
      break;
    }
    case CostKind::OracleCostly: {
      for (int j = 0; j < p; ++j) {
        out.costs[static_cast<std::size_t>(j)] = j < kSignalArms ? 1.1 : 0.8;
      }
      break;
    }
  }
  const double max_cost = *std::max_element(out.costs.begin(), out.costs.end());
  if (max_cost > 1.0) {
    for (double& c : out.costs) c /= max_cost;
    out.budget_divisor = max_cost;
  }
  return out;
}

void write_batch_csv(const Batch& batch, std::ostream& os) {
  const int n = static_cast<int>(batch.x.rows());
  const int p = static_cast<int>(batch.x.cols());
  os << "unit";
  for (int j = 0; j < p; ++j) os << ",x" << (j + 1);
  os << ",y0,y1\n";
  char buf[64];
  for (int i = 0; i < n; ++i) {
    os << i;
    for (int j = 0; j < p; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", batch.x(i, j));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", batch.y0(i), batch.y1(i));
    os << buf;
  }
}

}  // namespace darts
