#include "darts/design.hpp"

#include <algorithm>
#include <limits>

#include "darts/errors.hpp"

namespace darts {

namespace {

// Signed mean gap: Xbar_1 - Xbar_0 = (2/n) X' s with s_i = 2 z_i - 1.
Vector mean_gap(const Matrix& x, const Assignment& z) {
  const Eigen::Index n = x.rows();
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = z.z[static_cast<std::size_t>(i)] != 0 ? 1.0 : -1.0;
  }
  return (2.0 / static_cast<double>(n)) * (x.transpose() * s);
}

}  // namespace

double mahalanobis_distance(const Matrix& x, const Assignment& z, const Matrix& sigma_pinv) {
  if (z.size() != static_cast<int>(x.rows())) {
    throw InvalidInput("mahalanobis_distance: assignment length != rows");
  }
  if (x.cols() == 0) return 0.0;
  const Vector d = mean_gap(x, z);
  return d.dot(sigma_pinv * d);
}

Assignment complete_randomization(int n, Rng& rng) {
  if (n <= 0 || n % 2 != 0) throw InvalidInput("complete_randomization: n must be positive and even");
  Assignment a;
  a.z.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n / 2; ++i) a.z[static_cast<std::size_t>(i)] = 1;
  rng.shuffle(a.z);
  return a;
}

Assignment rerandomize(const Matrix& x, int n_candidates, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  if (n <= 0 || n % 2 != 0) throw InvalidInput("rerandomize: n must be positive and even");
  if (n_candidates < 1) throw InvalidInput("rerandomize: need at least one candidate");

  const Eigen::Index p = x.cols();
  Matrix sigma_pinv;
  Matrix xt;
  if (p > 0) {
    sigma_pinv = pseudoinverse(sample_covariance(x));
    xt = x.transpose();
  }

  // Candidates are scored in chunks: one GEMM per chunk of sign vectors,
  // scanned in draw order so ties keep the first-drawn minimizer.
  constexpr int kChunk = 256;
  std::vector<std::uint8_t> base(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n / 2; ++i) base[static_cast<std::size_t>(i)] = 1;

  Assignment best;
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<Assignment> chunk;
  chunk.reserve(kChunk);
  Matrix signs(n, kChunk);

  int drawn = 0;
  while (drawn < n_candidates) {
    const int m = std::min(kChunk, n_candidates - drawn);
    chunk.clear();
    for (int c = 0; c < m; ++c) {
      std::vector<std::uint8_t> zc = base;
      rng.shuffle(zc);
      chunk.push_back(Assignment{std::move(zc)});
      if (p > 0) {
        for (int i = 0; i < n; ++i) {
          signs(i, c) = chunk.back().z[static_cast<std::size_t>(i)] != 0 ? 1.0 : -1.0;
        }
      }
    }
    if (p > 0) {
      const Matrix gaps = (2.0 / static_cast<double>(n)) * (xt * signs.leftCols(m));
      const Matrix q = sigma_pinv * gaps;
      for (int c = 0; c < m; ++c) {
        const double d = gaps.col(c).dot(q.col(c));
        if (d < best_d) {
          best_d = d;
          best = chunk[static_cast<std::size_t>(c)];
        }
      }
    } else if (drawn == 0) {
      best = chunk.front();  // all distances are zero; first drawn wins
      best_d = 0.0;
    }
    drawn += m;
  }

  // Mirror flip preserves P(Z_i = 1) = 1/2 marginally.
  if (rng.uniform() < 0.5) return best.complement();
  return best;
}

}  // namespace darts
