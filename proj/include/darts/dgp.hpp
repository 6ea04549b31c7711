#pragma once

#include <iosfwd>
#include <vector>

#include "darts/numerics.hpp"
#include "darts/rng.hpp"

namespace darts {

enum class DgpKind { Linear, Liang, LiangHeteroTE };

// How to read the N(m, v) notation for the coefficient draws: v as a
// variance (default) or as a standard deviation.
enum class BetaScale { Variance, StdDev };

struct OutcomeSurface {
  DgpKind kind = DgpKind::Liang;
  Vector beta;           // drawn once per replication, fixed across batches
  double tau = 4.0;      // constant treatment effect (Linear / Liang)
  double noise_sd = 1.0;
};

// beta_j ~ N(2, 0.1) for the first 10 arms, N(-2, 0.05) for arms 11-20 and
// N(0, 0.01) beyond: signal plus weak-but-nonzero noise coefficients.
Vector draw_beta_coefficients(int p, Rng& rng, BetaScale scale = BetaScale::Variance);

OutcomeSurface make_surface(DgpKind kind, int p, Rng& rng,
                            BetaScale scale = BetaScale::Variance, double tau = 4.0,
                            double noise_sd = 1.0);

// Both potential outcomes are generated before any assignment exists.
struct Batch {
  Matrix x;   // n x p covariates as the experimenter would measure them
  Vector y0;
  Vector y1;
};

// Independent standard-normal covariates;
// Y(0) = X'beta + 2 X_1 X_5 + noise, Y(1) = Y(0) + tau.
Batch gen_linear_batch(const OutcomeSurface& surface, int n, int p, Rng& rng);

// Shared-random-effect covariates X_ij = (e_i + z_ij)/2, min-max scaled to
// [0,1] per column and then centered at the batch mean;
// Y(0) = 10 X_2/(1+X_1^2) + 5 sin(X_3 - X_4) + 2 X_5 + X'beta + noise.
Batch gen_liang_batch(const OutcomeSurface& surface, int n, int p, Rng& rng);

// Liang-structured Y(0); the unit-level effect is a Friedman-style function
// of the [0,1]-scaled (uncentered) covariates 6-10:
// tau_i = 2 + 3 sin(pi X_6 X_7) + 4 (X_8 - 0.5)^2 + 2 X_9 + X_10.
Batch gen_hetero_te_batch(const OutcomeSurface& surface, int n, int p, Rng& rng);

enum class CostKind { Equal, UniformRandom, OracleCostly };

struct CostDraw {
  std::vector<double> costs;    // in (0, 1] after max-rescaling
  double budget_divisor = 1.0;  // divide the budget by this to keep the feasible set
};

// Equal: all ones. UniformRandom: U(0,2) floored at 1e-6, max-rescaled.
// OracleCostly: 1.1 for the 20 oracle arms, 0.8 elsewhere, max-rescaled.
CostDraw make_costs(CostKind kind, int p, Rng& rng);

// Columnar debug dump: unit id, covariates, y0, y1.
void write_batch_csv(const Batch& batch, std::ostream& os);

}  // namespace darts
