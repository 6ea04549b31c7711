#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "darts_cli_tests";

int run_cli(const std::string& args, const fs::path& stderr_to = {}) {
  std::string cmd = std::string(DARTS_CLI_PATH) + " " + args + " > /dev/null";
  cmd += stderr_to.empty() ? " 2> /dev/null" : " 2> " + stderr_to.string();
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_config(const fs::path& p, const std::string& extra = "") {
  std::ofstream os(p);
  os << "# tiny smoke-test experiment\n"
     << "dgp = liang\n"
     << "p = 20\n"
     << "n = 20\n"
     << "batches = 5\n"
     << "budget = 50\n"
     << "candidates = 30\n"
     << "cv_folds = 3\n"
     << "seed = 3\n"
     << extra;
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

}  // namespace

TEST_CASE("run writes a T-row trace and is byte-idempotent") {
  Workspace ws;
  const fs::path cfg = kWork / "exp.cfg";
  write_config(cfg);

  const std::string base_args = "run --config " + cfg.string() + " --method darts";
  REQUIRE(run_cli(base_args + " --out-dir " + (kWork / "a").string()) == 0);
  REQUIRE(run_cli(base_args + " --out-dir " + (kWork / "b").string()) == 0);

  const fs::path trace_a = kWork / "a" / "run_darts_s3_trace.csv";
  const fs::path trace_b = kWork / "b" / "run_darts_s3_trace.csv";
  REQUIRE(fs::exists(trace_a));
  const std::string ta = slurp(trace_a);
  CHECK(count_lines(ta) == 5 + 2);  // manifest reference + header + T rows
  CHECK(ta == slurp(trace_b));
  CHECK(fs::exists(kWork / "a" / "run_darts_s3_arms.csv"));
  CHECK(fs::exists(kWork / "a" / "run_darts_s3_manifest.json"));
}

TEST_CASE("config errors exit with code 2 and name the problem") {
  Workspace ws;
  const fs::path missing = kWork / "missing.cfg";
  {
    std::ofstream os(missing);
    os << "dgp = liang\np = 20\nn = 20\nbatches = 5\n";  // no budget
  }
  const fs::path err = kWork / "err.txt";
  CHECK(run_cli("run --config " + missing.string(), err) == 2);
  CHECK(slurp(err).find("budget") != std::string::npos);

  const fs::path garbled = kWork / "garbled.cfg";
  {
    std::ofstream os(garbled);
    os << "this is not a config\n";
  }
  CHECK(run_cli("run --config " + garbled.string()) == 2);
  CHECK(run_cli("run --config " + (kWork / "absent.cfg").string()) == 2);
}

TEST_CASE("oracle runs warn that the budget flag is ignored") {
  Workspace ws;
  const fs::path cfg = kWork / "exp.cfg";
  write_config(cfg);
  const fs::path err = kWork / "warn.txt";
  REQUIRE(run_cli("run --config " + cfg.string() + " --method oracle --budget 10 --out-dir " +
                      (kWork / "o").string(),
                  err) == 0);
  CHECK(slurp(err).find("ignored") != std::string::npos);
}

TEST_CASE("mc summaries are identical across worker counts") {
  Workspace ws;
  const fs::path cfg = kWork / "exp.cfg";
  write_config(cfg, "methods = dim,darts\n");

  const std::string base = "mc --config " + cfg.string() + " --reps 4";
  REQUIRE(run_cli(base + " --workers 1 --out-dir " + (kWork / "w1").string()) == 0);
  REQUIRE(run_cli(base + " --workers 2 --out-dir " + (kWork / "w2").string()) == 0);
  const std::string s1 = slurp(kWork / "w1" / "mc_summary.csv");
  CHECK(!s1.empty());
  CHECK(s1 == slurp(kWork / "w2" / "mc_summary.csv"));
}

TEST_CASE("diagnose consumes mc traces and fails cleanly on an empty directory") {
  Workspace ws;
  const fs::path cfg = kWork / "exp.cfg";
  write_config(cfg, "methods = dim,darts\n");

  const fs::path traces = kWork / "traces";
  REQUIRE(run_cli("mc --config " + cfg.string() + " --reps 3 --workers 2 --traces --out-dir " +
                  traces.string()) == 0);
  REQUIRE(run_cli("diagnose " + traces.string() + " --burn-in 1 --out-dir " +
                  (kWork / "diag").string()) == 0);
  CHECK(fs::exists(kWork / "diag" / "posterior.csv"));
  CHECK(fs::exists(kWork / "diag" / "budget_share.csv"));
  CHECK(fs::exists(kWork / "diag" / "reward_se.csv"));

  const std::string posterior = slurp(kWork / "diag" / "posterior.csv");
  CHECK(count_lines(posterior) == 1 + 3 * 20);  // header + (reps x arms)

  const fs::path empty = kWork / "empty";
  fs::create_directories(empty);
  CHECK(run_cli("diagnose " + empty.string()) == 3);
}
