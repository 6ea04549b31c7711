#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "darts/rng.hpp"

namespace darts {

// One covariate-acquisition arm: Beta pseudo-posterior, dual shadow price,
// and its nominal / budget-rescaled measurement cost.
struct ArmState {
  double alpha = 1.0;
  double beta = 1.0;
  double shadow_price = 1.0;
  double nominal_cost = 1.0;   // in (0, 1] after normalization
  double rescaled_cost = 0.0;  // nominal_cost * B0 / B
  long pulls = 0;
};

struct BanditState {
  std::vector<ArmState> arms;
  double budget_shadow = 1.0;       // dual price on the global budget row
  double remaining_budget = 0.0;    // B_t, in rescaled units
  double epsilon = 0.0;             // sqrt(log(p+1) / B0)
  std::optional<int> max_arms_per_round;  // optional degree-of-freedom cap

  double initial_budget = 0.0;  // B0 = min(B, T)
  double budget = 0.0;          // B after cost normalization
  int horizon = 0;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  bool costs_clamped = false;   // some cost <= 0 was clamped to 1e-6
  bool costs_rescaled = false;  // costs > 1 were divided by their max
};

struct SuperArm {
  std::vector<int> indices;  // ascending, distinct
  double total_rescaled_cost = 0.0;

  bool empty() const { return indices.empty(); }
};

// Costs <= 0 are clamped to 1e-6; if any cost exceeds 1, all costs and the
// budget are divided by the max cost (the feasible set is unchanged).
BanditState init_bandit(int p, const std::vector<double>& costs, double budget, int horizon,
                        double prior_alpha = 1.0, double prior_beta = 1.0,
                        std::optional<int> max_arms = std::nullopt);

// One posterior draw theta_j ~ Beta(alpha_j, beta_j) per arm.
std::vector<double> sample_means(const BanditState& state, Rng& rng);

// c_j^eff = rescaled_cost_j * budget_shadow + shadow_price_j.
std::vector<double> effective_costs(const BanditState& state);

// Greedy scan in decreasing theta_j / c_j^eff (ties to the lower index).
// An arm is added iff its rescaled cost fits the running budget, which starts
// at min(remaining_budget, max_round_spend), and the per-round arm cap is not
// exceeded. Effective costs rank; feasibility is in rescaled nominal costs.
SuperArm select_super_arm(const BanditState& state, const std::vector<double>& sampled,
                          double max_round_spend = std::numeric_limits<double>::infinity());

// Dual update for a feasible selection: nu_j *= (1+eps),
// nu_budget *= (1+eps)^{c_j} per selected arm; budget decremented.
void commit_selection(BanditState& state, const SuperArm& chosen);

// Beta pseudo-posterior update, rewards in [0, 1] aligned with chosen.indices.
void update_rewards(BanditState& state, const SuperArm& chosen, const std::vector<double>& rewards);

inline double posterior_mean(const ArmState& arm) { return arm.alpha / (arm.alpha + arm.beta); }

// Structured text snapshot (per-arm alpha, beta, nu, costs, pulls plus the
// global duals) consumed by the diagnostics tooling.
std::string snapshot(const BanditState& state);

}  // namespace darts
