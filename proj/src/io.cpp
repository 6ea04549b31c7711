#include "darts/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "darts/config.hpp"
#include "darts/errors.hpp"

namespace darts {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::stringstream ss(line);
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string run_id(const SimConfig& cfg, std::uint64_t base_seed) {
  std::string canon;
  for (const auto& [k, v] : config_echo(cfg)) canon += k + "=" + v + ";";
  std::uint64_t h = splitmix64(base_seed);
  for (char c : canon) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_trace(std::ostream& os, const SimConfig& cfg, const ReplicationResult& result,
                 const std::string& manifest_ref) {
  os << "# manifest=" << manifest_ref << "\n";
  os << "method,seed,t,n_selected,selected,spend,tau_hat,v_hat,mu_hat,sigma2_hat,"
        "mean_reward,oracle_share,fallback,degenerate,unstable,df_used\n";
  const std::string method = to_string(result.method);
  for (const BatchRecord& b : result.batches) {
    os << method << ',' << result.seed << ',' << b.t << ',' << b.selected.size() << ',';
    for (std::size_t k = 0; k < b.selected.size(); ++k) {
      if (k > 0) os << ';';
      os << b.selected[k];
    }
    os << ',' << fmt_double(b.spend) << ',' << fmt_double(b.tau_hat) << ',' << fmt_double(b.v_hat)
       << ',' << fmt_double(b.mu_hat) << ',' << fmt_double(b.sigma2_hat) << ','
       << fmt_double(b.mean_reward) << ',' << fmt_double(b.oracle_share) << ','
       << (b.fallback ? 1 : 0) << ',' << (b.degenerate ? 1 : 0) << ',' << (b.unstable ? 1 : 0)
       << ',' << b.df_used << "\n";
  }
  (void)cfg;
}

void write_arms(std::ostream& os, const SimConfig& cfg, const ReplicationResult& result,
                const std::string& manifest_ref) {
  os << "# manifest=" << manifest_ref << "\n";
  os << "method,seed,arm,alpha,beta,shadow_price,pulls,pi,signal\n";
  const std::string method = to_string(result.method);
  for (std::size_t j = 0; j < result.final_alpha.size(); ++j) {
    const double pi = result.final_alpha[j] / (result.final_alpha[j] + result.final_beta[j]);
    os << method << ',' << result.seed << ',' << j << ',' << fmt_double(result.final_alpha[j])
       << ',' << fmt_double(result.final_beta[j]) << ',' << fmt_double(result.final_shadow[j])
       << ',' << result.pulls[j] << ',' << fmt_double(pi) << ',' << (j < 20 ? 1 : 0) << "\n";
  }
  (void)cfg;
}

void write_summary(std::ostream& os, const std::vector<SimConfig>& grid,
                   const std::vector<McSummary>& summaries, const std::string& manifest_ref) {
  os << "# manifest=" << manifest_ref << "\n";
  os << "dgp,p,n,batches,budget,costs,method,reward_mode,reps_requested,reps_ok,"
        "mean_ate,bias,emp_sd,mse,rmse,median_se,coverage,re_vs_dim,rel_rmse,ci_width\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const SimConfig& c = grid[i];
    const McSummary& s = summaries[i];
    os << to_string(c.dgp) << ',' << c.p << ',' << c.n << ',' << c.batches << ','
       << fmt_double(c.budget) << ',' << to_string(c.costs) << ',' << to_string(s.method) << ','
       << to_string(c.reward_mode) << ',' << s.reps_requested << ',' << s.reps_ok << ','
       << fmt_double(s.mean_ate) << ',' << fmt_double(s.bias) << ',' << fmt_double(s.emp_sd) << ','
       << fmt_double(s.mse) << ',' << fmt_double(s.rmse) << ',' << fmt_double(s.median_se) << ','
       << fmt_double(s.coverage) << ',' << fmt_double(s.re_vs_dim) << ','
       << fmt_double(s.rel_rmse) << ',' << fmt_double(s.ci_width) << "\n";
  }
}

void print_summary_table(std::ostream& os, const std::vector<SimConfig>& grid,
                         const std::vector<McSummary>& summaries) {
  os << std::left << std::setw(8) << "method" << std::right << std::setw(10) << "bias"
     << std::setw(10) << "emp_sd" << std::setw(12) << "mse" << std::setw(10) << "med_se"
     << std::setw(10) << "coverage" << std::setw(10) << "re_dim" << std::setw(10) << "rel_rmse"
     << std::setw(8) << "ok" << "\n";
  char buf[160];
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const McSummary& s = summaries[i];
    std::snprintf(buf, sizeof buf, "%-8s%10.4f%10.4f%12.6f%10.4f%10.3f%10.3f%10.3f%8d\n",
                  to_string(s.method).c_str(), s.bias, s.emp_sd, s.mse, s.median_se, s.coverage,
                  s.re_vs_dim, s.rel_rmse, s.reps_ok);
    os << buf;
  }
  (void)grid;
}

void write_manifest(std::ostream& os, const SimConfig& cfg, std::uint64_t base_seed,
                    const std::string& command, const std::string& started_at,
                    const std::string& finished_at, const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["artifact_version"] = "0.1.0";
  j["run_id"] = run_id(cfg, base_seed);
  j["command"] = command;
  j["base_seed"] = base_seed;
  j["started_at"] = started_at;
  j["finished_at"] = finished_at;
  nlohmann::json cfg_json;
  for (const auto& [k, v] : config_echo(cfg)) cfg_json[k] = v;
  j["config"] = cfg_json;
  j["outputs"] = outputs;
  os << j.dump(2) << "\n";
}

TraceFile read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("read_trace: cannot open '" + path + "'");
  TraceFile tf;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() < 16) throw InvalidInput("read_trace: malformed row in '" + path + "'");
    tf.method = parse_method(f[0]);
    tf.seed = std::stoull(f[1]);
    BatchRecord b;
    b.t = std::stoi(f[2]);
    if (!f[4].empty()) {
      for (const std::string& tok : split(f[4], ';')) {
        if (!tok.empty()) b.selected.push_back(std::stoi(tok));
      }
    }
    b.spend = std::stod(f[5]);
    b.tau_hat = std::stod(f[6]);
    b.v_hat = std::stod(f[7]);
    b.mu_hat = std::stod(f[8]);
    b.sigma2_hat = std::stod(f[9]);
    b.mean_reward = std::stod(f[10]);
    b.oracle_share = std::stod(f[11]);
    b.fallback = f[12] == "1";
    b.degenerate = f[13] == "1";
    b.unstable = f[14] == "1";
    b.df_used = std::stoi(f[15]);
    tf.batches.push_back(std::move(b));
  }
  if (!seen_header) throw InvalidInput("read_trace: '" + path + "' has no header");
  return tf;
}

ArmsFile read_arms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("read_arms: cannot open '" + path + "'");
  ArmsFile af;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() < 9) throw InvalidInput("read_arms: malformed row in '" + path + "'");
    af.method = parse_method(f[0]);
    af.seed = std::stoull(f[1]);
    af.alpha.push_back(std::stod(f[3]));
    af.beta.push_back(std::stod(f[4]));
  }
  if (!seen_header) throw InvalidInput("read_arms: '" + path + "' has no header");
  return af;
}

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace darts
