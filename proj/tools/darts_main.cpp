#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "darts/config.hpp"
#include "darts/errors.hpp"
#include "darts/harness.hpp"
#include "darts/io.hpp"

namespace fs = std::filesystem;
using namespace darts;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  ConfigOverrides ov;
};

std::string default_out_dir() {
  const char* env = std::getenv("DARTS_OUT_DIR");
  return env && *env ? env : ".";
}

void add_override_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  cmd->add_option("--out-dir", opts.out_dir, "output directory (env DARTS_OUT_DIR)");
  cmd->add_option("--seed", opts.ov.seed, "base seed override");
  cmd->add_option("--method", opts.ov.method, "dim | random | darts | oracle");
  cmd->add_option("--dgp", opts.ov.dgp, "linear | liang | hetero");
  cmd->add_option("--budget", opts.ov.budget, "total measurement budget");
  cmd->add_option("--batches", opts.ov.batches, "number of batches T");
  cmd->add_option("--batch-size", opts.ov.n, "units per batch n (even)");
  cmd->add_option("--p", opts.ov.p, "number of candidate covariates");
  cmd->add_option("--candidates", opts.ov.candidates, "rerandomization candidates per batch");
  cmd->add_option("--reward-mode", opts.ov.reward_mode, "fractional | binary");
  cmd->add_option("--max-arms", opts.ov.max_arms, "per-batch cap on measured covariates");
}

std::string ensure_dir(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  body(os);
}

int cmd_run(const CommonOpts& opts) {
  SimConfig cfg = load_sim_config(opts.config_path, opts.ov);
  if (cfg.method == Method::Oracle && opts.ov.budget) {
    std::cerr << "warning: --budget is ignored for the oracle method (budget-free)\n";
  }
  const std::string out = ensure_dir(opts.out_dir.empty() ? default_out_dir() : opts.out_dir);
  const std::string id = run_id(cfg, cfg.seed);
  const std::string base =
      out + "/run_" + to_string(cfg.method) + "_s" + std::to_string(cfg.seed);
  const std::string manifest_path = base + "_manifest.json";
  const std::string manifest_ref = fs::path(manifest_path).filename().string() + " id=" + id;

  const std::string started = iso8601_now();
  const ReplicationResult result = run_replication(cfg);
  const std::string finished = iso8601_now();

  std::vector<std::string> outputs;
  const std::string trace_path = base + "_trace.csv";
  write_file(trace_path, [&](std::ostream& os) { write_trace(os, cfg, result, manifest_ref); });
  outputs.push_back(trace_path);
  if (!result.final_alpha.empty()) {
    const std::string arms_path = base + "_arms.csv";
    write_file(arms_path, [&](std::ostream& os) { write_arms(os, cfg, result, manifest_ref); });
    outputs.push_back(arms_path);
  }
  write_file(manifest_path, [&](std::ostream& os) {
    write_manifest(os, cfg, cfg.seed, "run", started, finished, outputs);
  });

  std::cout << "method=" << to_string(cfg.method) << " seed=" << cfg.seed
            << " mu_hat=" << fmt_double(result.final_estimate.mu_hat)
            << " sigma_hat=" << fmt_double(std::sqrt(std::max(0.0, result.final_estimate.sigma2_hat)))
            << " ci95=[" << fmt_double(result.final_interval.lo) << ","
            << fmt_double(result.final_interval.hi) << "]"
            << " batches_pooled=" << result.final_estimate.batches_pooled << "\n";
  return kExitOk;
}

int cmd_mc(const CommonOpts& opts, int reps, int workers, bool keep_traces) {
  const SimConfig base_cfg = load_sim_config(opts.config_path, opts.ov);
  const std::vector<Method> methods = load_method_list(opts.config_path, opts.ov);

  std::vector<SimConfig> grid;
  for (Method m : methods) {
    SimConfig c = base_cfg;
    c.method = m;
    grid.push_back(c);
  }

  const std::string out = ensure_dir(opts.out_dir.empty() ? default_out_dir() : opts.out_dir);
  const std::string id = run_id(base_cfg, base_cfg.seed);
  const std::string manifest_path = out + "/mc_manifest.json";
  const std::string manifest_ref = fs::path(manifest_path).filename().string() + " id=" + id;

  ResultHandler handler;
  if (keep_traces) {
    handler = [&](const RepTask& task, const ReplicationResult& result) {
      if (result.failed) return;
      SimConfig cfg = grid[static_cast<std::size_t>(task.config_index)];
      cfg.seed = task.seed;
      const std::string base =
          out + "/mc_" + to_string(cfg.method) + "_s" + std::to_string(task.seed);
      write_file(base + "_trace.csv",
                 [&](std::ostream& os) { write_trace(os, cfg, result, manifest_ref); });
      if (!result.final_alpha.empty()) {
        write_file(base + "_arms.csv",
                   [&](std::ostream& os) { write_arms(os, cfg, result, manifest_ref); });
      }
    };
  }

  const std::string started = iso8601_now();
  const GridOutcome outcome = run_grid(grid, reps, workers, handler);
  const std::string finished = iso8601_now();

  for (const FailedRep& f : outcome.failures) {
    std::cerr << "warning: replication failed (method="
              << to_string(grid[static_cast<std::size_t>(f.task.config_index)].method)
              << " seed=" << f.task.seed << "): " << f.reason << "\n";
  }

  const std::string summary_path = out + "/mc_summary.csv";
  write_file(summary_path,
             [&](std::ostream& os) { write_summary(os, grid, outcome.summaries, manifest_ref); });
  write_file(manifest_path, [&](std::ostream& os) {
    write_manifest(os, base_cfg, base_cfg.seed, "mc", started, finished, {summary_path});
  });

  print_summary_table(std::cout, grid, outcome.summaries);
  return kExitOk;
}

int cmd_diagnose(const std::string& dir, int burn_in, const std::string& out_dir) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: '" << dir << "' is not a directory\n";
    return kExitData;
  }
  std::vector<std::string> trace_paths, arms_paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 10 && name.rfind("_trace.csv") == name.size() - 10) {
      trace_paths.push_back(entry.path().string());
    } else if (name.size() > 9 && name.rfind("_arms.csv") == name.size() - 9) {
      arms_paths.push_back(entry.path().string());
    }
  }
  if (trace_paths.empty()) {
    std::cerr << "error: no *_trace.csv files in '" << dir << "'\n";
    return kExitData;
  }
  std::sort(trace_paths.begin(), trace_paths.end());
  std::sort(arms_paths.begin(), arms_paths.end());

  std::map<std::uint64_t, ArmsFile> arms_by_seed;
  for (const std::string& p : arms_paths) {
    ArmsFile af = read_arms(p);
    if (af.method == Method::DARTS) arms_by_seed[af.seed] = std::move(af);
  }

  std::vector<ReplicationResult> results;
  for (const std::string& p : trace_paths) {
    TraceFile tf = read_trace(p);
    ReplicationResult r;
    r.method = tf.method;
    r.seed = tf.seed;
    r.batches = std::move(tf.batches);
    const auto it = arms_by_seed.find(r.seed);
    if (r.method == Method::DARTS && it != arms_by_seed.end()) {
      r.final_alpha = it->second.alpha;
      r.final_beta = it->second.beta;
    }
    results.push_back(std::move(r));
  }

  const DiagnosticsTables tables = diagnostics(results, burn_in);

  const std::string out = ensure_dir(out_dir.empty() ? default_out_dir() : out_dir);
  write_file(out + "/posterior.csv", [&](std::ostream& os) {
    os << "replication,arm,pi,signal\n";
    for (const auto& row : tables.posteriors) {
      os << row.seed << ',' << row.arm << ',' << fmt_double(row.pi) << ',' << (row.signal ? 1 : 0)
         << "\n";
    }
  });
  write_file(out + "/budget_share.csv", [&](std::ostream& os) {
    os << "t,median,lo95,hi95\n";
    for (const auto& row : tables.budget_share) {
      os << row.t << ',' << fmt_double(row.median) << ',' << fmt_double(row.lo95) << ','
         << fmt_double(row.hi95) << "\n";
    }
  });
  write_file(out + "/reward_se.csv", [&](std::ostream& os) {
    os << "t,mean_reward,se_ratio\n";
    for (const auto& row : tables.reward_se) {
      os << row.t << ',' << fmt_double(row.mean_reward) << ',' << fmt_double(row.se_ratio) << "\n";
    }
  });

  nlohmann::json j;
  j["command"] = "diagnose";
  j["burn_in"] = burn_in;
  j["inputs"] = trace_paths;
  j["outputs"] = {out + "/posterior.csv", out + "/budget_share.csv", out + "/reward_se.csv"};
  write_file(out + "/diagnose_manifest.json",
             [&](std::ostream& os) { os << j.dump(2) << "\n"; });

  std::cout << "posterior mean: signal=" << fmt_double(tables.mean_pi_signal)
            << " noise=" << fmt_double(tables.mean_pi_noise)
            << "\nreward-SE correlation (post burn-in): raw=" << fmt_double(tables.reward_se_corr)
            << " per-batch means=" << fmt_double(tables.reward_se_corr_by_batch)
            << "\nbudget-share trend (Spearman vs batch): "
            << fmt_double(tables.share_trend_spearman) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"budgeted adaptive covariate acquisition for sequential randomized trials"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "execute one replication and write its trace");
  add_override_flags(run, run_opts);

  CommonOpts mc_opts;
  int reps = 100;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  bool keep_traces = false;
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo summary over replications and methods");
  add_override_flags(mc, mc_opts);
  mc->add_option("--reps", reps, "replications per method");
  mc->add_option("--workers", workers, "worker threads (summary is worker-count invariant)");
  mc->add_flag("--traces", keep_traces, "also write one trace file per replication");

  std::string diag_dir;
  std::string diag_out;
  int burn_in = 30;
  CLI::App* diag = app.add_subcommand("diagnose", "figure-ready CSVs from trace files");
  diag->add_option("dir", diag_dir, "directory holding *_trace.csv / *_arms.csv")->required();
  diag->add_option("--burn-in", burn_in, "batches to drop from the reward-SE table");
  diag->add_option("--out-dir", diag_out, "output directory (env DARTS_OUT_DIR)");

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(run_opts);
    if (mc->parsed()) {
      if (reps < 1) throw ConfigError("mc: --reps must be >= 1");
      if (workers < 1) workers = 1;
      return cmd_mc(mc_opts, reps, workers, keep_traces);
    }
    if (diag->parsed()) return cmd_diagnose(diag_dir, burn_in, diag_out);
    return kExitConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
