#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "darts/harness.hpp"

namespace darts {

// Bad or missing configuration; the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` file with '#' comments. Unknown keys are rejected so a
// typo cannot silently fall back to a default.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

// Optional command-line overrides; set fields win over file values.
struct ConfigOverrides {
  std::optional<std::string> dgp, method, reward_mode, costs;
  std::optional<int> p, n, batches, candidates, cv_folds, max_arms;
  std::optional<double> budget;
  std::optional<std::uint64_t> seed;
};

// Required file keys: dgp, p, n, batches, budget. Everything else defaults.
SimConfig load_sim_config(const std::string& path, const ConfigOverrides& overrides);

// Method list for `mc` runs (file key `methods`, default all four).
std::vector<Method> load_method_list(const std::string& path, const ConfigOverrides& overrides);

// Canonical echo of a config, used in manifests and for the run id.
std::vector<std::pair<std::string, std::string>> config_echo(const SimConfig& cfg);

Method parse_method(const std::string& s);
DgpKind parse_dgp(const std::string& s);
CostKind parse_costs(const std::string& s);
RewardMode parse_reward_mode(const std::string& s);

}  // namespace darts
