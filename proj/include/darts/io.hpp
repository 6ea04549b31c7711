#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "darts/harness.hpp"

namespace darts {

// Floating-point text form used in every output file: 17 significant digits,
// enough to round-trip a double bit-exactly.
std::string fmt_double(double v);

// Deterministic run identifier from the canonical config echo and seed;
// output files reference the manifest through it.
std::string run_id(const SimConfig& cfg, std::uint64_t base_seed);

// Per-batch trace. First line is a `# manifest=...` reference, then a header
// and one row per batch.
void write_trace(std::ostream& os, const SimConfig& cfg, const ReplicationResult& result,
                 const std::string& manifest_ref);

// Final per-arm posterior state of a learning run.
void write_arms(std::ostream& os, const SimConfig& cfg, const ReplicationResult& result,
                const std::string& manifest_ref);

// Dense table the `mc` subcommand writes and prints.
void write_summary(std::ostream& os, const std::vector<SimConfig>& grid,
                   const std::vector<McSummary>& summaries, const std::string& manifest_ref);
void print_summary_table(std::ostream& os, const std::vector<SimConfig>& grid,
                         const std::vector<McSummary>& summaries);

void write_manifest(std::ostream& os, const SimConfig& cfg, std::uint64_t base_seed,
                    const std::string& command, const std::string& started_at,
                    const std::string& finished_at, const std::vector<std::string>& outputs);

// Minimal readers for the trace/arms files (used by `diagnose`).
struct TraceFile {
  Method method = Method::DiM;
  std::uint64_t seed = 0;
  std::vector<BatchRecord> batches;
};
struct ArmsFile {
  Method method = Method::DARTS;
  std::uint64_t seed = 0;
  std::vector<double> alpha, beta;
};

TraceFile read_trace(const std::string& path);
ArmsFile read_arms(const std::string& path);

std::string iso8601_now();

}  // namespace darts
