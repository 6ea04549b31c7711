#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "darts/bandit.hpp"
#include "darts/dgp.hpp"
#include "darts/estimate.hpp"

namespace darts {

enum class Method { DiM, Random, DARTS, Oracle };
enum class RewardMode { Fractional, Binary };

struct SimConfig {
  DgpKind dgp = DgpKind::Liang;
  int p = 100;
  int n = 100;          // units per batch, even
  int batches = 100;    // T
  double budget = 2000.0;
  CostKind costs = CostKind::Equal;
  Method method = Method::DARTS;
  RewardMode reward_mode = RewardMode::Fractional;
  int n_candidates = 1000;  // rerandomization draws per batch
  std::uint64_t seed = 1;
  int cv_folds = 5;
  std::optional<int> max_arms;   // degree-of-freedom cap, off by default
  bool adjust = true;            // Lin adjustment on top of rerandomization
  BetaScale beta_scale = BetaScale::Variance;
  bool random_redraw_per_batch = false;  // Random baseline redraws its subset
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
};

struct BatchRecord {
  int t = 0;                    // 1-based batch index
  std::vector<int> selected;    // measured covariate columns
  double spend = 0.0;           // rescaled cost consumed (NaN when budget-free)
  double tau_hat = 0.0;
  double v_hat = 0.0;
  double mu_hat = 0.0;          // pooled state after this batch
  double sigma2_hat = 0.0;
  double mean_reward = 0.0;
  double oracle_share = 0.0;    // share of spend on the oracle arms (NaN if no spend)
  bool fallback = false;        // empty super-arm, degraded to DiM behavior
  bool degenerate = false;      // batch skipped by the pooling update
  bool unstable = false;
  int df_used = 0;
};

struct ReplicationResult {
  Method method = Method::DARTS;
  std::uint64_t seed = 0;
  std::vector<BatchRecord> batches;

  // Final bandit state (empty for non-learning methods).
  std::vector<double> final_alpha;
  std::vector<double> final_beta;
  std::vector<double> final_shadow;
  std::vector<long> pulls;

  std::vector<double> rescaled_costs;  // empty when the method has no budget
  double budget_initial = 0.0;         // B0 in rescaled units

  CumulativeEstimate final_estimate;
  WaldInterval final_interval;
  double true_ate = 0.0;  // realized mean of Y(1) - Y(0) over all generated units
  double wall_seconds = 0.0;

  bool failed = false;
  std::string fail_reason;
};

// Ordered hook for the acquisition/outcome separation audit.
enum class AuditKind { Select, Generate, Assign, Observe, Estimate, RewardUpdate };
using AuditHook = std::function<void(int batch, AuditKind)>;

ReplicationResult run_darts_replication(const SimConfig& cfg, const AuditHook& hook = {});
ReplicationResult run_baseline_replication(const SimConfig& cfg);
ReplicationResult run_replication(const SimConfig& cfg);

struct McSummary {
  Method method = Method::DiM;
  int reps_requested = 0;
  int reps_ok = 0;
  double mean_ate = 0.0;
  double bias = 0.0;
  double emp_sd = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double median_se = 0.0;
  double coverage = 0.0;   // 95% Wald
  double re_vs_dim = 1.0;  // DiM MSE over this method's MSE
  double rel_rmse = 1.0;   // DiM RMSE over this method's RMSE
  double ci_width = 0.0;   // 2 * z * median SE
};

struct RepTask {
  int config_index = 0;
  int rep = 0;             // 1-based
  std::uint64_t seed = 0;  // cfg.seed + rep
};

struct FailedRep {
  RepTask task;
  std::string reason;
};

// Invoked from worker threads; tasks are disjoint, so per-task work needs no
// locking as long as the handler writes task-owned outputs.
using ResultHandler = std::function<void(const RepTask&, const ReplicationResult&)>;

struct GridOutcome {
  std::vector<McSummary> summaries;  // one per grid entry, grid order
  std::vector<FailedRep> failures;
};

// Replication r of grid entry c runs with seed = cfg.seed + r for
// r = 1..reps. Results are aggregated in task order, so the summary does not
// depend on the worker count.
GridOutcome run_grid(const std::vector<SimConfig>& grid, int reps, int workers,
                     const ResultHandler& handler = {});

// Same scheduling, but every ReplicationResult is retained (task order).
GridOutcome run_grid_collect(const std::vector<SimConfig>& grid, int reps, int workers,
                             std::vector<ReplicationResult>& results);

// Cumulative oracle-set regret sum_s [r(S*_s) - r(S_s)] with theta* = 1 on the
// oracle arms. The reference S*_t is the budget-feasible prefix of oracle
// arms under the same paced greedy rule the policy uses.
std::vector<double> cumulative_oracle_regret(const ReplicationResult& result,
                                             const std::vector<int>& oracle_set);

// Per-batch median cumulative regret across replications.
std::vector<double> regret_curve(const std::vector<ReplicationResult>& results,
                                 const std::vector<int>& oracle_set);

struct DiagnosticsTables {
  struct ShareRow {
    int t;
    double median, lo95, hi95;
  };
  struct RewardSeRow {
    int t;
    double mean_reward;
    double se_ratio;  // batch SE of DiM over batch SE of DARTS, same seed
  };
  struct PosteriorRow {
    std::uint64_t seed;
    int arm;
    double pi;
    bool signal;
  };

  std::vector<ShareRow> budget_share;
  std::vector<RewardSeRow> reward_se;
  std::vector<PosteriorRow> posteriors;
  double mean_pi_signal = 0.0;
  double mean_pi_noise = 0.0;
  double reward_se_corr = 0.0;           // over raw (replication, batch) pairs
  double reward_se_corr_by_batch = 0.0;  // over per-batch means across replications
  double share_trend_spearman = 0.0;
};

// Consumes a mixed-method result set; DARTS rows drive the posterior and
// budget-share tables, DiM rows with matching seeds provide the SE ratios.
DiagnosticsTables diagnostics(const std::vector<ReplicationResult>& results, int burn_in = 30,
                              int n_oracle = 20);

// Small stats helpers shared by diagnostics and the verification suites.
double percentile(std::vector<double> values, double prob);
double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);
double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

std::vector<int> oracle_indices(int n_oracle = 20);
double reference_ate(const SimConfig& cfg);

std::string to_string(Method m);
std::string to_string(DgpKind k);
std::string to_string(CostKind k);
std::string to_string(RewardMode m);

}  // namespace darts
