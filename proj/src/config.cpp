#include "darts/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace darts {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const std::set<std::string> kKnownKeys = {
    "dgp",       "p",           "n",          "batches",    "budget",     "costs",
    "method",    "methods",     "reward_mode", "candidates", "seed",       "cv_folds",
    "max_arms",  "adjust",      "beta_scale", "random_redraw", "prior_alpha", "prior_beta",
};

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw ConfigError("config: bad integer for '" + key + "': " + v);
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for '" + key + "': " + v);
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw ConfigError("config: bad number for '" + key + "': " + v);
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config: bad boolean for '" + key + "': " + v);
}

}  // namespace

Method parse_method(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "dim") return Method::DiM;
  if (v == "random") return Method::Random;
  if (v == "darts") return Method::DARTS;
  if (v == "oracle") return Method::Oracle;
  throw ConfigError("config: unknown method '" + s + "' (dim, random, darts, oracle)");
}

DgpKind parse_dgp(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "linear") return DgpKind::Linear;
  if (v == "liang") return DgpKind::Liang;
  if (v == "hetero" || v == "liang_hetero") return DgpKind::LiangHeteroTE;
  throw ConfigError("config: unknown dgp '" + s + "' (linear, liang, hetero)");
}

CostKind parse_costs(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "equal") return CostKind::Equal;
  if (v == "uniform") return CostKind::UniformRandom;
  if (v == "oracle_costly") return CostKind::OracleCostly;
  throw ConfigError("config: unknown costs '" + s + "' (equal, uniform, oracle_costly)");
}

RewardMode parse_reward_mode(const std::string& s) {
  const std::string v = lower(trim(s));
  if (v == "fractional") return RewardMode::Fractional;
  if (v == "binary") return RewardMode::Binary;
  throw ConfigError("config: unknown reward_mode '" + s + "' (fractional, binary)");
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    }
    const std::string key = lower(trim(t.substr(0, eq)));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key or value");
    }
    if (!kKnownKeys.count(key)) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
    kv[key] = value;
  }
  return kv;
}

SimConfig load_sim_config(const std::string& path, const ConfigOverrides& ov) {
  const auto kv = parse_key_value_file(path);
  auto has = [&](const char* k) { return kv.count(k) > 0; };
  auto get = [&](const char* k) { return kv.at(k); };

  for (const char* required : {"dgp", "p", "n", "batches", "budget"}) {
    if (!has(required) &&
        !((std::string(required) == "dgp" && ov.dgp) || (std::string(required) == "p" && ov.p) ||
          (std::string(required) == "n" && ov.n) ||
          (std::string(required) == "batches" && ov.batches) ||
          (std::string(required) == "budget" && ov.budget))) {
      throw ConfigError("config: missing required field '" + std::string(required) + "'");
    }
  }

  SimConfig cfg;
  cfg.dgp = ov.dgp ? parse_dgp(*ov.dgp) : parse_dgp(get("dgp"));
  cfg.p = ov.p ? *ov.p : parse_int("p", get("p"));
  cfg.n = ov.n ? *ov.n : parse_int("n", get("n"));
  cfg.batches = ov.batches ? *ov.batches : parse_int("batches", get("batches"));
  cfg.budget = ov.budget ? *ov.budget : parse_double("budget", get("budget"));

  if (has("costs")) cfg.costs = parse_costs(get("costs"));
  if (ov.costs) cfg.costs = parse_costs(*ov.costs);
  if (has("method")) cfg.method = parse_method(get("method"));
  if (ov.method) cfg.method = parse_method(*ov.method);
  if (has("reward_mode")) cfg.reward_mode = parse_reward_mode(get("reward_mode"));
  if (ov.reward_mode) cfg.reward_mode = parse_reward_mode(*ov.reward_mode);
  if (has("candidates")) cfg.n_candidates = parse_int("candidates", get("candidates"));
  if (ov.candidates) cfg.n_candidates = *ov.candidates;
  if (has("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int("seed", get("seed")));
  if (ov.seed) cfg.seed = *ov.seed;
  if (has("cv_folds")) cfg.cv_folds = parse_int("cv_folds", get("cv_folds"));
  if (ov.cv_folds) cfg.cv_folds = *ov.cv_folds;
  if (has("max_arms") && lower(get("max_arms")) != "none") {
    cfg.max_arms = parse_int("max_arms", get("max_arms"));
  }
  if (ov.max_arms) cfg.max_arms = *ov.max_arms;
  if (has("adjust")) cfg.adjust = parse_bool("adjust", get("adjust"));
  if (has("beta_scale")) {
    const std::string v = lower(get("beta_scale"));
    if (v == "variance") {
      cfg.beta_scale = BetaScale::Variance;
    } else if (v == "sd") {
      cfg.beta_scale = BetaScale::StdDev;
    } else {
      throw ConfigError("config: beta_scale must be 'variance' or 'sd'");
    }
  }
  if (has("random_redraw")) cfg.random_redraw_per_batch = parse_bool("random_redraw", get("random_redraw"));
  if (has("prior_alpha")) cfg.prior_alpha = parse_double("prior_alpha", get("prior_alpha"));
  if (has("prior_beta")) cfg.prior_beta = parse_double("prior_beta", get("prior_beta"));
  return cfg;
}

std::vector<Method> load_method_list(const std::string& path, const ConfigOverrides& ov) {
  if (ov.method) return {parse_method(*ov.method)};
  const auto kv = parse_key_value_file(path);
  std::string spec = "dim,random,darts,oracle";
  if (kv.count("methods")) {
    spec = kv.at("methods");
  } else if (kv.count("method")) {
    spec = kv.at("method");
  }
  std::vector<Method> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!trim(tok).empty()) out.push_back(parse_method(tok));
  }
  if (out.empty()) throw ConfigError("config: empty method list");
  return out;
}

std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("dgp", to_string(cfg.dgp));
  kv.emplace_back("p", std::to_string(cfg.p));
  kv.emplace_back("n", std::to_string(cfg.n));
  kv.emplace_back("batches", std::to_string(cfg.batches));
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", cfg.budget);
    kv.emplace_back("budget", buf);
  }
  kv.emplace_back("costs", to_string(cfg.costs));
  kv.emplace_back("method", to_string(cfg.method));
  kv.emplace_back("reward_mode", to_string(cfg.reward_mode));
  kv.emplace_back("candidates", std::to_string(cfg.n_candidates));
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("cv_folds", std::to_string(cfg.cv_folds));
  kv.emplace_back("max_arms", cfg.max_arms ? std::to_string(*cfg.max_arms) : "none");
  kv.emplace_back("adjust", cfg.adjust ? "true" : "false");
  kv.emplace_back("beta_scale", cfg.beta_scale == BetaScale::Variance ? "variance" : "sd");
  kv.emplace_back("random_redraw", cfg.random_redraw_per_batch ? "true" : "false");
  return kv;
}

}  // namespace darts
