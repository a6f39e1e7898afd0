#ifndef RSDESIGN_CLI_HPP
#define RSDESIGN_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "rsdesign/criteria.hpp"
#include "rsdesign/graphs.hpp"
#include "rsdesign/model.hpp"

namespace rsdesign {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,      // bad configuration, flags or input files
  kExitInfeasible = 3,  // no design with a defined criterion exists or was found
  kExitContract = 4,    // request the design cannot honor
};

/// Settings shared by the subcommands. Loaded from a JSON file, then
/// overridden by command-line flags.
///
///   {
///     "q": 3, "runs": 26,
///     "region": {"kind": "cube"} | {"kind": "sphere", "rho": 2.236},
///     "model": "quadratic" | "intercept",
///     "criterion": {
///       "kappa": [9 numbers] | {"D_S": 0.5, "I_D": 0.5, "df": 0, ...},
///       "alpha": 0.05,                 // all four, or per criterion:
///       "alphas": {"DP": 0.05, "AP": 0.05, "IP": 0.05, "IDP": 0.05},
///       "quadratic_weight": 0.25,      // or "weights": [p numbers]
///       "sphere_measure": "surface" | "volume"
///     },
///     "search": {"starts": 100, "max_passes": 50, "seed": 1, "threads": 0},
///     "graph": {"variant": "FDS", "scale": "variance" | "se",
///               "interval_alpha": 0.05, "axis": "distance" | "volume",
///               "radii": 101, "samples": 100000, "shell_samples": 10000,
///               "seed": 1},
///     "snap": true,
///     "output": {"design": "best.csv", "report": "report.txt"}
///   }
struct RunConfig {
  int q = 0;
  int runs = 0;
  RegionKind region_kind = RegionKind::Cube;
  std::optional<double> rho;  // sphere radius; defaults to sqrt(q)
  bool intercept_only = false;
  /// Defaults to D_S alone; `evaluate` reports all criteria regardless.
  CriterionConfig criterion = CriterionConfig::single(Criterion::Ds);
  std::optional<double> quadratic_weight;
  int starts = 100;
  int max_passes = 50;
  std::uint64_t seed = 20240607;
  int threads = 0;
  GraphConfig graph;
  /// Snap rounded published coordinates onto the sphere on import.
  bool snap = true;
  std::string design_output;
  std::string report_output;

  Region region() const;
  ModelSpec model() const;
  /// Criterion context with W resolved from `weights` or `quadratic_weight`.
  CriterionContext context() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Parses JSON text; unknown keys are rejected. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, const std::string& source = "<config>");
RunConfig load_run_config(const std::string& path);

/// Runs the tool with the given arguments (argv[0] is the program name) and
/// returns the exit code. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsdesign

#endif  // RSDESIGN_CLI_HPP
