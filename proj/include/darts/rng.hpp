#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace darts {

// Labels for per-purpose random substreams. A replication derives one
// independent stream per (batch, stage) pair so that, e.g., the assignment
// draw for batch t is the same no matter how many Beta samples the selection
// step consumed. Values are part of the reproducibility contract.
enum class Stage : std::uint64_t {
  kBetaDraw = 1,    // replication-level outcome-surface coefficients
  kCosts = 2,       // replication-level cost draw
  kSubset = 3,      // random-baseline covariate subset
  kDgp = 4,         // per-batch covariates, potential outcomes, noise
  kSelection = 5,   // per-batch posterior sampling
  kAssignment = 6,  // per-batch candidate assignments and mirror flip
  kCvFolds = 7,     // per-batch cross-validation fold shuffle
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic substream seed for (seed, batch, stage). Batch 0 is reserved
// for replication-level stages; batches are numbered 1..T.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t batch, Stage stage);

// Deterministic generator: mt19937_64 core (bit-exact per the standard) with
// hand-rolled samplers so draws do not depend on the standard library's
// unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); safe as a log/pow argument.
  double uniform_pos() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Standard normal via Box-Muller; the pair's second value is cached.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double gamma(double shape);

  // Beta(a, b) as a ratio of two Gamma draws.
  double beta(double a, double b);

  // Uniform integer in [0, bound); rejection sampled, unbiased.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace darts
