#include "darts/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "darts/errors.hpp"

namespace darts {

BanditState init_bandit(int p, const std::vector<double>& costs, double budget, int horizon,
                        double prior_alpha, double prior_beta, std::optional<int> max_arms) {
  if (p < 1) throw InvalidInput("init_bandit: need at least one arm");
  if (static_cast<int>(costs.size()) != p) throw InvalidInput("init_bandit: costs length != p");
  if (!(budget > 0.0)) throw InvalidInput("init_bandit: budget must be positive");
  if (horizon < 1) throw InvalidInput("init_bandit: horizon must be >= 1");
  if (!(prior_alpha > 0.0) || !(prior_beta > 0.0)) {
    throw InvalidInput("init_bandit: Beta prior parameters must be positive");
  }

  BanditState state;
  state.horizon = horizon;
  state.prior_alpha = prior_alpha;
  state.prior_beta = prior_beta;
  state.max_arms_per_round = max_arms;

  std::vector<double> c = costs;
  for (double& v : c) {
    if (!(v > 0.0)) {
      v = 1e-6;
      state.costs_clamped = true;
    }
  }
  const double max_cost = *std::max_element(c.begin(), c.end());
  if (max_cost > 1.0) {
    for (double& v : c) v /= max_cost;
    budget /= max_cost;
    state.costs_rescaled = true;
  }

  state.budget = budget;
  state.initial_budget = std::min(budget, static_cast<double>(horizon));
  state.remaining_budget = state.initial_budget;
  state.epsilon = std::sqrt(std::log(static_cast<double>(p) + 1.0) / state.initial_budget);

  state.arms.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    ArmState& arm = state.arms[static_cast<std::size_t>(j)];
    arm.alpha = prior_alpha;
    arm.beta = prior_beta;
    arm.shadow_price = 1.0;
    arm.nominal_cost = c[static_cast<std::size_t>(j)];
    arm.rescaled_cost = arm.nominal_cost * state.initial_budget / state.budget;
    arm.pulls = 0;
  }
  return state;
}

std::vector<double> sample_means(const BanditState& state, Rng& rng) {
  std::vector<double> out(state.arms.size());
  for (std::size_t j = 0; j < state.arms.size(); ++j) {
    out[j] = rng.beta(state.arms[j].alpha, state.arms[j].beta);
  }
  return out;
}

std::vector<double> effective_costs(const BanditState& state) {
  std::vector<double> out(state.arms.size());
  for (std::size_t j = 0; j < state.arms.size(); ++j) {
    out[j] = state.arms[j].rescaled_cost * state.budget_shadow + state.arms[j].shadow_price;
  }
  return out;
}

SuperArm select_super_arm(const BanditState& state, const std::vector<double>& sampled,
                          double max_round_spend) {
  const int p = static_cast<int>(state.arms.size());
  if (static_cast<int>(sampled.size()) != p) {
    throw InvalidInput("select_super_arm: sampled length != number of arms");
  }

  const std::vector<double> eff = effective_costs(state);
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ratio(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    ratio[static_cast<std::size_t>(j)] = sampled[static_cast<std::size_t>(j)] /
                                         eff[static_cast<std::size_t>(j)];
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double ra = ratio[static_cast<std::size_t>(a)];
    const double rb = ratio[static_cast<std::size_t>(b)];
    if (ra != rb) return ra > rb;
    return a < b;
  });

  SuperArm chosen;
  double running = std::min(state.remaining_budget, max_round_spend);
  const int cap = state.max_arms_per_round.value_or(p);
  for (int j : order) {
    if (static_cast<int>(chosen.indices.size()) >= cap) break;
    const double c = state.arms[static_cast<std::size_t>(j)].rescaled_cost;
    if (c <= running) {
      chosen.indices.push_back(j);
      chosen.total_rescaled_cost += c;
      running -= c;
    }
  }
  std::sort(chosen.indices.begin(), chosen.indices.end());
  return chosen;
}

void commit_selection(BanditState& state, const SuperArm& chosen) {
  if (chosen.total_rescaled_cost > state.remaining_budget + 1e-9) {
    throw ContractViolation("commit_selection: selection exceeds remaining budget");
  }
  const double growth = 1.0 + state.epsilon;
  for (int j : chosen.indices) {
    if (j < 0 || j >= static_cast<int>(state.arms.size())) {
      throw ContractViolation("commit_selection: arm index out of range");
    }
    ArmState& arm = state.arms[static_cast<std::size_t>(j)];
    arm.shadow_price *= growth;
    state.budget_shadow *= std::pow(growth, arm.rescaled_cost);
    arm.pulls += 1;
  }
  state.remaining_budget = std::max(0.0, state.remaining_budget - chosen.total_rescaled_cost);
}

void update_rewards(BanditState& state, const SuperArm& chosen, const std::vector<double>& rewards) {
  if (rewards.size() != chosen.indices.size()) {
    throw InvalidInput("update_rewards: one reward per chosen arm required");
  }
  for (double r : rewards) {
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidInput("update_rewards: reward outside [0,1]");
  }
  for (std::size_t k = 0; k < chosen.indices.size(); ++k) {
    ArmState& arm = state.arms[static_cast<std::size_t>(chosen.indices[k])];
    arm.alpha += rewards[k];
    arm.beta += 1.0 - rewards[k];
  }
}

std::string snapshot(const BanditState& state) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "epsilon,%.17g\nbudget_shadow,%.17g\nremaining_budget,%.17g\n",
                state.epsilon, state.budget_shadow, state.remaining_budget);
  out += buf;
  out += "arm,alpha,beta,shadow_price,nominal_cost,rescaled_cost,pulls\n";
  for (std::size_t j = 0; j < state.arms.size(); ++j) {
    const ArmState& a = state.arms[j];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%ld\n", j, a.alpha, a.beta,
                  a.shadow_price, a.nominal_cost, a.rescaled_cost, a.pulls);
    out += buf;
  }
  return out;
}

}  // namespace darts
