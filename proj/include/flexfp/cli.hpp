#pragma once

// Command implementations behind the `flexfp` executable. Each returns a
// process exit status and writes only to the given streams and named files.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace flexfp::cli {

enum class Mapping { Exact, Storage };

struct RunManifest {
  std::string kernel;
  std::vector<std::uint64_t> seeds;
  std::optional<std::size_t> size;
  std::optional<std::uint64_t> iterations;  // JACOBI sweeps
  std::string type_system = "v2";
  std::optional<double> threshold;
  std::optional<std::string> precision_file;
  std::optional<std::string> format;  // uniform format for every variable
  std::optional<Mapping> mapping;     // run/tune default Exact, stats/cost Storage
  std::optional<std::string> tables;
  std::optional<std::string> report;
  std::optional<std::string> baseline;
  std::optional<std::string> stats;
  std::optional<std::string> input;   // golden input file
  std::optional<std::string> output;  // generate: input file to write
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Prints kernel output, one value per line. --stats writes the event
/// counts, --report a run report with the metric against the reference.
int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err);
/// Writes the precision file (--precision-file) and a summary; --report
/// adds the structured tuning report.
int cmd_tune(const RunManifest& m, std::ostream& out, std::ostream& err);
/// Event counts of one run as a report, to --report or standard output.
int cmd_stats(const RunManifest& m, std::ostream& out, std::ostream& err);
/// Cost estimate of --stats (or a fresh run), normalized to --baseline (or
/// the all-binary32 run of the same input).
int cmd_cost(const RunManifest& m, std::ostream& out, std::ostream& err);
/// Saves a generated input to --output.
int cmd_generate(const RunManifest& m, std::ostream& out, std::ostream& err);
/// Kernels and their variable groups in declaration order.
int cmd_list(std::ostream& out);

/// Full command line, CLI11 parsing included.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flexfp::cli
