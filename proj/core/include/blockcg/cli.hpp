#pragma once

#include <string>
#include <vector>

#include "blockcg/experiments.hpp"

namespace blockcg {

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by parse_args when --help was requested; carries the help text.
struct HelpRequested {
  std::string text;
};

struct RunConfig {
  enum class Source { example, spectrum_file, poisson, list };
  Source source = Source::list;
  std::string example_id;
  std::string spectrum_path;
  int grid = 20;
  bool use_ic0 = false;
  int s = 0;  // 0: scenario default
  double tol = 0;
  int max_m = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<int> m_override;
  int j_max_override = -1;
  int k1_override = -1;
  int k2_override = -1;
  std::string out_dir = ".";
  bool write_csv = true;
  bool write_json = true;
};

/// Parses `example <id>`, `spectrum <file>`, `poisson --grid g [--ic0]` and
/// `list` plus the shared flags. Throws UsageError with a one-line reason.
/// The BLOCKCG_SEED environment variable overrides the default seed; an
/// explicit --seed overrides both.
RunConfig parse_args(const std::vector<std::string>& args);

/// One positive decimal value per line; blank lines and lines starting with
/// '#' are ignored; values are sorted ascending on load, duplicates allowed.
Vector load_spectrum_file(const std::string& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

/// Writes residuals.csv, one bounds_m<M>_k<K1>_<K2>.csv per bound config and
/// summary.json into out_dir. Returns the paths written. Output is
/// byte-stable for identical artifacts.
std::vector<std::string> emit(const RunArtifact& artifact,
                              const std::string& out_dir, bool write_csv,
                              bool write_json);

/// Resolves a RunConfig into a scenario (applying overrides).
Scenario scenario_from_config(const RunConfig& cfg);

/// Full dispatch for the command line tool. Returns the process exit code:
/// 0 on success, 1 on IO errors or partial per-config failures, 2 on usage
/// errors.
int run_cli(int argc, const char* const* argv);

}  // namespace blockcg
