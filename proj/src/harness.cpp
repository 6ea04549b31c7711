#include "darts/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

#include "darts/design.hpp"
#include "darts/errors.hpp"
#include "darts/reward.hpp"

namespace darts {

namespace {

constexpr int kOracleArms = 20;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const SimConfig& cfg) {
  if (cfg.n < 2 || cfg.n % 2 != 0) throw InvalidInput("config: n must be even and positive");
  if (cfg.batches < 1) throw InvalidInput("config: batches must be >= 1");
  if (!(cfg.budget > 0.0)) throw InvalidInput("config: budget must be positive");
  if (cfg.n_candidates < 1) throw InvalidInput("config: candidates must be >= 1");
  if (cfg.cv_folds < 2) throw InvalidInput("config: cv_folds must be >= 2");
}

Batch generate_batch(const SimConfig& cfg, const OutcomeSurface& surface, Rng& rng) {
  switch (cfg.dgp) {
    case DgpKind::Linear:
      return gen_linear_batch(surface, cfg.n, cfg.p, rng);
    case DgpKind::Liang:
      return gen_liang_batch(surface, cfg.n, cfg.p, rng);
    case DgpKind::LiangHeteroTE:
      return gen_hetero_te_batch(surface, cfg.n, cfg.p, rng);
  }
  throw InvalidInput("config: unknown dgp");
}

Matrix select_columns(const Matrix& x, const std::vector<int>& cols) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = x.col(cols[k]);
  }
  return out;
}

Vector observed_outcomes(const Batch& b, const Assignment& z) {
  Vector y(b.y0.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = z.z[static_cast<std::size_t>(i)] != 0 ? b.y1(i) : b.y0(i);
  }
  return y;
}

double oracle_spend_share(const std::vector<int>& selected, const std::vector<double>& rescaled,
                          int n_oracle) {
  double total = 0.0;
  double on_oracle = 0.0;
  for (int j : selected) {
    const double c = rescaled[static_cast<std::size_t>(j)];
    total += c;
    if (j < n_oracle) on_oracle += c;
  }
  return total > 0.0 ? on_oracle / total : kNaN;
}

void emit(const AuditHook& hook, int batch, AuditKind kind) {
  if (hook) hook(batch, kind);
}

// Shuffled scan over all arms, adding any whose cost still fits the
// per-batch allowance.
std::vector<int> draw_budget_feasible_subset(int p, const std::vector<double>& costs,
                                             double per_batch_budget, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<int> subset;
  double remaining = per_batch_budget;
  for (int j : order) {
    const double c = costs[static_cast<std::size_t>(j)];
    if (c <= remaining) {
      subset.push_back(j);
      remaining -= c;
    }
  }
  std::sort(subset.begin(), subset.end());
  return subset;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<int> oracle_indices(int n_oracle) {
  std::vector<int> out(static_cast<std::size_t>(n_oracle));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

double reference_ate(const SimConfig& cfg) {
  return cfg.dgp == DgpKind::LiangHeteroTE ? kNaN : 4.0;
}

ReplicationResult run_darts_replication(const SimConfig& cfg, const AuditHook& hook) {
  if (cfg.method != Method::DARTS) throw InvalidInput("run_darts_replication: method must be DARTS");
  validate_config(cfg);
  const auto t_start = std::chrono::steady_clock::now();

  Rng surface_rng(derive_stream(cfg.seed, 0, Stage::kBetaDraw));
  const OutcomeSurface surface = make_surface(cfg.dgp, cfg.p, surface_rng, cfg.beta_scale);

  Rng cost_rng(derive_stream(cfg.seed, 0, Stage::kCosts));
  const CostDraw cost_draw = make_costs(cfg.costs, cfg.p, cost_rng);
  const double budget = cfg.budget / cost_draw.budget_divisor;

  BanditState state = init_bandit(cfg.p, cost_draw.costs, budget, cfg.batches, cfg.prior_alpha,
                                  cfg.prior_beta, cfg.max_arms);

  ReplicationResult res;
  res.method = Method::DARTS;
  res.seed = cfg.seed;
  res.budget_initial = state.initial_budget;
  res.rescaled_costs.resize(state.arms.size());
  for (std::size_t j = 0; j < state.arms.size(); ++j) {
    res.rescaled_costs[j] = state.arms[j].rescaled_cost;
  }

  CumulativeEstimate cum;
  double te_sum = 0.0;

  for (int t = 1; t <= cfg.batches; ++t) {
    // Arm selection happens strictly before the batch exists: the selection
    // rule is measurable with respect to past batches only.
    Rng sel_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kSelection));
    const std::vector<double> sampled = sample_means(state, sel_rng);
    // Spread the remaining budget over the remaining rounds; leftover
    // allowance rolls forward through remaining_budget.
    const double allowance = state.remaining_budget / static_cast<double>(cfg.batches - t + 1);
    const SuperArm chosen = select_super_arm(state, sampled, allowance);
    commit_selection(state, chosen);
    emit(hook, t, AuditKind::Select);

    Rng dgp_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kDgp));
    const Batch batch = generate_batch(cfg, surface, dgp_rng);
    te_sum += (batch.y1 - batch.y0).sum();
    emit(hook, t, AuditKind::Generate);

    const Matrix measured = select_columns(batch.x, chosen.indices);

    Rng asg_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kAssignment));
    const Assignment z = chosen.empty() ? complete_randomization(cfg.n, asg_rng)
                                        : rerandomize(measured, cfg.n_candidates, asg_rng);
    emit(hook, t, AuditKind::Assign);

    const Vector y = observed_outcomes(batch, z);
    emit(hook, t, AuditKind::Observe);

    const BatchEstimate est = (chosen.empty() || !cfg.adjust) ? difference_in_means(y, z)
                                                              : lin_adjusted(y, z, measured);
    const CumulativeEstimate next = pool(cum, est);
    const bool skipped = next.batches_pooled == cum.batches_pooled;
    cum = next;
    emit(hook, t, AuditKind::Estimate);

    double mean_reward = 0.0;
    if (!chosen.empty()) {
      // Predictiveness is scored on control units only.
      std::vector<Eigen::Index> controls;
      for (int i = 0; i < cfg.n; ++i) {
        if (z.z[static_cast<std::size_t>(i)] == 0) controls.push_back(i);
      }
      if (static_cast<int>(controls.size()) >= 2) {
        Matrix xc(static_cast<Eigen::Index>(controls.size()), measured.cols());
        Vector yc(static_cast<Eigen::Index>(controls.size()));
        for (std::size_t i = 0; i < controls.size(); ++i) {
          xc.row(static_cast<Eigen::Index>(i)) = measured.row(controls[i]);
          yc(static_cast<Eigen::Index>(i)) = y(controls[i]);
        }
        const int folds = std::max(2, std::min<int>(cfg.cv_folds, static_cast<int>(controls.size())));
        Rng cv_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kCvFolds));
        const LassoFit fit = lasso_cv(xc, yc, folds, cv_rng);
        const std::vector<double> rewards = cfg.reward_mode == RewardMode::Fractional
                                                ? fractional_rewards(fit, chosen)
                                                : binary_rewards(fit, chosen);
        mean_reward = mean_of(rewards);
        // An empty LASSO selection leaves the prior untouched.
        if (fit.selected_any) update_rewards(state, chosen, rewards);
      }
    }
    emit(hook, t, AuditKind::RewardUpdate);

    BatchRecord rec;
    rec.t = t;
    rec.selected = chosen.indices;
    rec.spend = chosen.total_rescaled_cost;
    rec.tau_hat = est.tau_hat;
    rec.v_hat = est.v_hat;
    rec.mu_hat = cum.mu_hat;
    rec.sigma2_hat = cum.sigma2_hat;
    rec.mean_reward = mean_reward;
    rec.oracle_share = oracle_spend_share(chosen.indices, res.rescaled_costs, kOracleArms);
    rec.fallback = chosen.empty();
    rec.degenerate = skipped;
    rec.unstable = est.unstable;
    rec.df_used = est.df_used;
    res.batches.push_back(std::move(rec));
  }

  res.final_alpha.reserve(state.arms.size());
  res.final_beta.reserve(state.arms.size());
  res.final_shadow.reserve(state.arms.size());
  res.pulls.reserve(state.arms.size());
  for (const ArmState& arm : state.arms) {
    res.final_alpha.push_back(arm.alpha);
    res.final_beta.push_back(arm.beta);
    res.final_shadow.push_back(arm.shadow_price);
    res.pulls.push_back(arm.pulls);
  }
  res.final_estimate = cum;
  res.final_interval = wald_interval(cum, 0.95);
  res.true_ate = te_sum / (static_cast<double>(cfg.batches) * cfg.n);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

ReplicationResult run_baseline_replication(const SimConfig& cfg) {
  if (cfg.method == Method::DARTS) {
    throw InvalidInput("run_baseline_replication: method must be DiM, Random or Oracle");
  }
  validate_config(cfg);
  const auto t_start = std::chrono::steady_clock::now();

  Rng surface_rng(derive_stream(cfg.seed, 0, Stage::kBetaDraw));
  const OutcomeSurface surface = make_surface(cfg.dgp, cfg.p, surface_rng, cfg.beta_scale);

  ReplicationResult res;
  res.method = cfg.method;
  res.seed = cfg.seed;

  // The Random baseline pays for its subset at the same rescaled costs the
  // learner faces; Oracle is budget-free, DiM measures nothing.
  std::vector<double> costs_norm;
  double per_batch_budget = 0.0;
  if (cfg.method == Method::Random) {
    Rng cost_rng(derive_stream(cfg.seed, 0, Stage::kCosts));
    const CostDraw cost_draw = make_costs(cfg.costs, cfg.p, cost_rng);
    const double budget = cfg.budget / cost_draw.budget_divisor;
    costs_norm = cost_draw.costs;
    per_batch_budget = budget / cfg.batches;
    res.budget_initial = std::min(budget, static_cast<double>(cfg.batches));
    res.rescaled_costs.resize(costs_norm.size());
    for (std::size_t j = 0; j < costs_norm.size(); ++j) {
      res.rescaled_costs[j] = costs_norm[j] * res.budget_initial / budget;
    }
  }

  std::vector<int> subset;
  if (cfg.method == Method::Oracle) {
    subset = oracle_indices(kOracleArms);
  } else if (cfg.method == Method::Random && !cfg.random_redraw_per_batch) {
    Rng subset_rng(derive_stream(cfg.seed, 0, Stage::kSubset));
    subset = draw_budget_feasible_subset(cfg.p, costs_norm, per_batch_budget, subset_rng);
  }

  CumulativeEstimate cum;
  double te_sum = 0.0;

  for (int t = 1; t <= cfg.batches; ++t) {
    Rng dgp_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kDgp));
    const Batch batch = generate_batch(cfg, surface, dgp_rng);
    te_sum += (batch.y1 - batch.y0).sum();

    if (cfg.method == Method::Random && cfg.random_redraw_per_batch) {
      Rng subset_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kSubset));
      subset = draw_budget_feasible_subset(cfg.p, costs_norm, per_batch_budget, subset_rng);
    }

    Rng asg_rng(derive_stream(cfg.seed, static_cast<std::uint64_t>(t), Stage::kAssignment));
    Assignment z;
    Matrix measured;
    if (cfg.method == Method::DiM) {
      z = complete_randomization(cfg.n, asg_rng);
    } else {
      measured = select_columns(batch.x, subset);
      z = rerandomize(measured, cfg.n_candidates, asg_rng);
    }

    const Vector y = observed_outcomes(batch, z);
    const BatchEstimate est = (cfg.method == Method::DiM || !cfg.adjust)
                                  ? difference_in_means(y, z)
                                  : lin_adjusted(y, z, measured);
    const CumulativeEstimate next = pool(cum, est);
    const bool skipped = next.batches_pooled == cum.batches_pooled;
    cum = next;

    BatchRecord rec;
    rec.t = t;
    rec.selected = subset;
    if (cfg.method == Method::Random) {
      double spend = 0.0;
      for (int j : subset) spend += res.rescaled_costs[static_cast<std::size_t>(j)];
      rec.spend = spend;
      rec.oracle_share = oracle_spend_share(subset, res.rescaled_costs, kOracleArms);
    } else if (cfg.method == Method::Oracle) {
      rec.spend = kNaN;  // budget-free by definition
      rec.oracle_share = kNaN;
    }
    rec.tau_hat = est.tau_hat;
    rec.v_hat = est.v_hat;
    rec.mu_hat = cum.mu_hat;
    rec.sigma2_hat = cum.sigma2_hat;
    rec.degenerate = skipped;
    rec.unstable = est.unstable;
    rec.df_used = est.df_used;
    res.batches.push_back(std::move(rec));
  }

  res.final_estimate = cum;
  res.final_interval = wald_interval(cum, 0.95);
  res.true_ate = te_sum / (static_cast<double>(cfg.batches) * cfg.n);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

ReplicationResult run_replication(const SimConfig& cfg) {
  return cfg.method == Method::DARTS ? run_darts_replication(cfg) : run_baseline_replication(cfg);
}

namespace {

bool same_setup_ignoring_method(const SimConfig& a, const SimConfig& b) {
  return a.dgp == b.dgp && a.p == b.p && a.n == b.n && a.batches == b.batches &&
         a.budget == b.budget && a.costs == b.costs && a.n_candidates == b.n_candidates &&
         a.seed == b.seed && a.cv_folds == b.cv_folds && a.max_arms == b.max_arms &&
         a.adjust == b.adjust && a.beta_scale == b.beta_scale;
}

McSummary summarize(const SimConfig& cfg, const std::vector<const ReplicationResult*>& reps,
                    int reps_requested) {
  McSummary s;
  s.method = cfg.method;
  s.reps_requested = reps_requested;

  std::vector<double> mu, se, err;
  const double z = normal_quantile(0.975);
  int covered = 0;
  for (const ReplicationResult* r : reps) {
    if (r->failed) continue;
    const double tau = r->true_ate;
    mu.push_back(r->final_estimate.mu_hat);
    se.push_back(std::sqrt(std::max(0.0, r->final_estimate.sigma2_hat)));
    err.push_back(r->final_estimate.mu_hat - tau);
    if (std::abs(err.back()) <= z * se.back()) ++covered;
  }
  s.reps_ok = static_cast<int>(mu.size());
  if (s.reps_ok == 0) return s;

  s.mean_ate = mean_of(mu);
  s.bias = mean_of(err);
  double ss = 0.0;
  const double mbar = s.mean_ate;
  for (double m : mu) ss += (m - mbar) * (m - mbar);
  s.emp_sd = s.reps_ok > 1 ? std::sqrt(ss / (s.reps_ok - 1)) : 0.0;
  double mse = 0.0;
  for (double e : err) mse += e * e;
  s.mse = mse / s.reps_ok;
  s.rmse = std::sqrt(s.mse);
  s.median_se = percentile(se, 0.5);
  s.coverage = static_cast<double>(covered) / s.reps_ok;
  s.ci_width = 2.0 * z * s.median_se;
  return s;
}

GridOutcome run_grid_impl(const std::vector<SimConfig>& grid, int reps, int workers,
                          const ResultHandler& handler, std::vector<ReplicationResult>* keep) {
  if (reps < 1) throw InvalidInput("run_grid: reps must be >= 1");
  std::vector<RepTask> tasks;
  tasks.reserve(grid.size() * static_cast<std::size_t>(reps));
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    for (int r = 1; r <= reps; ++r) {
      tasks.push_back(RepTask{static_cast<int>(ci), r, grid[ci].seed + static_cast<std::uint64_t>(r)});
    }
  }

  std::vector<ReplicationResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const RepTask& task = tasks[i];
      SimConfig cfg = grid[static_cast<std::size_t>(task.config_index)];
      cfg.seed = task.seed;
      ReplicationResult res;
      try {
        res = run_replication(cfg);
      } catch (const std::exception& e) {
        res.method = cfg.method;
        res.seed = cfg.seed;
        res.failed = true;
        res.fail_reason = e.what();
      }
      if (handler) handler(task, res);
      results[i] = std::move(res);
    }
  };

  const int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers) - 1);
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  GridOutcome out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (results[i].failed) out.failures.push_back(FailedRep{tasks[i], results[i].fail_reason});
  }
  std::vector<std::vector<const ReplicationResult*>> by_config(grid.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    by_config[static_cast<std::size_t>(tasks[i].config_index)].push_back(&results[i]);
  }
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    out.summaries.push_back(summarize(grid[ci], by_config[ci], reps));
  }
  // Relative efficiency against the matching DiM row.
  for (std::size_t ci = 0; ci < grid.size(); ++ci) {
    McSummary& s = out.summaries[ci];
    if (grid[ci].method == Method::DiM) {
      s.re_vs_dim = 1.0;
      s.rel_rmse = 1.0;
      continue;
    }
    s.re_vs_dim = kNaN;
    s.rel_rmse = kNaN;
    for (std::size_t cj = 0; cj < grid.size(); ++cj) {
      if (grid[cj].method == Method::DiM && same_setup_ignoring_method(grid[ci], grid[cj])) {
        if (s.mse > 0.0) s.re_vs_dim = out.summaries[cj].mse / s.mse;
        if (s.rmse > 0.0) s.rel_rmse = out.summaries[cj].rmse / s.rmse;
        break;
      }
    }
  }
  if (keep) *keep = std::move(results);
  return out;
}

}  // namespace

GridOutcome run_grid(const std::vector<SimConfig>& grid, int reps, int workers,
                     const ResultHandler& handler) {
  return run_grid_impl(grid, reps, workers, handler, nullptr);
}

GridOutcome run_grid_collect(const std::vector<SimConfig>& grid, int reps, int workers,
                             std::vector<ReplicationResult>& results) {
  return run_grid_impl(grid, reps, workers, {}, &results);
}

std::vector<double> cumulative_oracle_regret(const ReplicationResult& result,
                                             const std::vector<int>& oracle_set) {
  if (result.rescaled_costs.empty() || result.batches.empty()) return {};
  const int T = static_cast<int>(result.batches.size());

  std::vector<int> oracle_order = oracle_set;
  std::sort(oracle_order.begin(), oracle_order.end(), [&](int a, int b) {
    const double ca = result.rescaled_costs[static_cast<std::size_t>(a)];
    const double cb = result.rescaled_costs[static_cast<std::size_t>(b)];
    if (ca != cb) return ca < cb;
    return a < b;
  });
  std::vector<bool> is_oracle(result.rescaled_costs.size(), false);
  for (int j : oracle_set) is_oracle[static_cast<std::size_t>(j)] = true;

  std::vector<double> out(static_cast<std::size_t>(T), 0.0);
  double remaining = result.budget_initial;
  double cum = 0.0;
  for (int t = 0; t < T; ++t) {
    double running = remaining / static_cast<double>(T - t);
    int star = 0;
    double spent = 0.0;
    for (int j : oracle_order) {
      const double c = result.rescaled_costs[static_cast<std::size_t>(j)];
      if (c <= running) {
        ++star;
        running -= c;
        spent += c;
      }
    }
    remaining -= spent;
    int observed = 0;
    for (int j : result.batches[static_cast<std::size_t>(t)].selected) {
      if (is_oracle[static_cast<std::size_t>(j)]) ++observed;
    }
    cum += static_cast<double>(star - observed);
    out[static_cast<std::size_t>(t)] = cum;
  }
  return out;
}

std::vector<double> regret_curve(const std::vector<ReplicationResult>& results,
                                 const std::vector<int>& oracle_set) {
  std::vector<std::vector<double>> curves;
  std::size_t T = 0;
  for (const ReplicationResult& r : results) {
    if (r.failed || r.rescaled_costs.empty()) continue;
    curves.push_back(cumulative_oracle_regret(r, oracle_set));
    T = std::max(T, curves.back().size());
  }
  std::vector<double> out(T, 0.0);
  std::vector<double> column;
  for (std::size_t t = 0; t < T; ++t) {
    column.clear();
    for (const auto& c : curves) {
      if (t < c.size()) column.push_back(c[t]);
    }
    out[t] = percentile(column, 0.5);
  }
  return out;
}

DiagnosticsTables diagnostics(const std::vector<ReplicationResult>& results, int burn_in,
                              int n_oracle) {
  DiagnosticsTables tables;

  std::vector<const ReplicationResult*> darts;
  std::map<std::uint64_t, const ReplicationResult*> dim_by_seed;
  for (const ReplicationResult& r : results) {
    if (r.failed) continue;
    if (r.method == Method::DARTS) darts.push_back(&r);
    if (r.method == Method::DiM) dim_by_seed[r.seed] = &r;
  }

  std::size_t T = 0;
  for (const auto* r : darts) T = std::max(T, r->batches.size());

  std::vector<double> medians;
  std::vector<double> batch_axis;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> shares;
    for (const auto* r : darts) {
      if (t >= r->batches.size()) continue;
      const double s = r->batches[t].oracle_share;
      if (std::isfinite(s)) shares.push_back(s);
    }
    if (shares.empty()) continue;
    DiagnosticsTables::ShareRow row;
    row.t = static_cast<int>(t) + 1;
    row.median = percentile(shares, 0.5);
    row.lo95 = percentile(shares, 0.025);
    row.hi95 = percentile(shares, 0.975);
    tables.budget_share.push_back(row);
    medians.push_back(row.median);
    batch_axis.push_back(static_cast<double>(row.t));
  }

  std::vector<double> rewards, ratios;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_batch;
  for (const auto* r : darts) {
    const auto it = dim_by_seed.find(r->seed);
    if (it == dim_by_seed.end()) continue;
    const ReplicationResult* dim = it->second;
    const std::size_t upto = std::min(r->batches.size(), dim->batches.size());
    for (std::size_t t = static_cast<std::size_t>(burn_in); t < upto; ++t) {
      const BatchRecord& bd = r->batches[t];
      const BatchRecord& bm = dim->batches[t];
      if (bd.fallback || !(bd.v_hat > 0.0) || !(bm.v_hat > 0.0)) continue;
      DiagnosticsTables::RewardSeRow row;
      row.t = bd.t;
      row.mean_reward = bd.mean_reward;
      row.se_ratio = std::sqrt(bm.v_hat / bd.v_hat);
      tables.reward_se.push_back(row);
      rewards.push_back(row.mean_reward);
      ratios.push_back(row.se_ratio);
      by_batch[row.t].first.push_back(row.mean_reward);
      by_batch[row.t].second.push_back(row.se_ratio);
    }
  }
  std::vector<double> reward_means, ratio_means;
  for (const auto& [t, pair] : by_batch) {
    reward_means.push_back(mean_of(pair.first));
    ratio_means.push_back(mean_of(pair.second));
  }

  double pi_signal_sum = 0.0;
  double pi_noise_sum = 0.0;
  long n_signal = 0;
  long n_noise = 0;
  for (const auto* r : darts) {
    for (std::size_t j = 0; j < r->final_alpha.size(); ++j) {
      DiagnosticsTables::PosteriorRow row;
      row.seed = r->seed;
      row.arm = static_cast<int>(j);
      row.pi = r->final_alpha[j] / (r->final_alpha[j] + r->final_beta[j]);
      row.signal = static_cast<int>(j) < n_oracle;
      tables.posteriors.push_back(row);
      if (row.signal) {
        pi_signal_sum += row.pi;
        ++n_signal;
      } else {
        pi_noise_sum += row.pi;
        ++n_noise;
      }
    }
  }
  tables.mean_pi_signal = n_signal > 0 ? pi_signal_sum / n_signal : 0.0;
  tables.mean_pi_noise = n_noise > 0 ? pi_noise_sum / n_noise : 0.0;
  tables.reward_se_corr = pearson_correlation(rewards, ratios);
  tables.reward_se_corr_by_batch = pearson_correlation(reward_means, ratio_means);
  tables.share_trend_spearman = spearman_correlation(batch_axis, medians);
  return tables;
}

double percentile(std::vector<double> values, double prob) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * values[lo] + w * values[hi];
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return kNaN;
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return kNaN;
  return sab / std::sqrt(saa * sbb);
}

namespace {

std::vector<double> ranks_with_ties(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return kNaN;
  return pearson_correlation(ranks_with_ties(a), ranks_with_ties(b));
}

std::string to_string(Method m) {
  switch (m) {
    case Method::DiM: return "dim";
    case Method::Random: return "random";
    case Method::DARTS: return "darts";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

std::string to_string(DgpKind k) {
  switch (k) {
    case DgpKind::Linear: return "linear";
    case DgpKind::Liang: return "liang";
    case DgpKind::LiangHeteroTE: return "hetero";
  }
  return "?";
}

std::string to_string(CostKind k) {
  switch (k) {
    case CostKind::Equal: return "equal";
    case CostKind::UniformRandom: return "uniform";
    case CostKind::OracleCostly: return "oracle_costly";
  }
  return "?";
}

std::string to_string(RewardMode m) {
  return m == RewardMode::Fractional ? "fractional" : "binary";
}

}  // namespace darts
