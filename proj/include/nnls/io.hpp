#pragma once

#include <map>
#include <string>
#include <vector>

#include "nnls/analytic.hpp"
#include "nnls/experiments.hpp"
#include "nnls/integrator.hpp"

namespace nnls {

inline constexpr const char* kToolVersion = "nnls 0.1.0";

/// Environment variable consulted for the default output directory.
inline constexpr const char* kOutputDirEnvVar = "NNLS_OUTPUT_DIR";

/// Parse or validation failure, anchored to a config line when applicable.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One run description: equation flavor, initial data (catalog entry or a
/// samples file, never both), grid, stepper settings, and output location.
struct RunConfig {
    SignFlag equation = SignFlag::focusing;
    SolutionSpec initial = ZeroData{};
    bool initial_set = false;
    std::string samples_file;  // exclusive with a catalog initial
    int grid_n = 4096;
    double grid_l = 0.0;  // resolved value; 0 while grid_l_auto
    bool grid_l_auto = true;
    StepperConfig stepper;
    double t_end = 1.0;
    std::string output_dir;
    std::string experiment;                          // optional named experiment
    std::map<std::string, double> numeric_params;    // raw numeric keys as parsed
};

/// Parses the flat key = value document (# comments, blank lines allowed).
/// Unknown keys, duplicates, malformed values, and conflicting initial-data
/// sources are errors carrying the offending line number. Entries in
/// `overrides` replace file values after parsing (command-line flags).
RunConfig parse_config(const std::string& text,
                       const std::map<std::string, std::string>& overrides = {});

/// Domain half-length policy: 40 / (slowest decay rate of the initial
/// datum), capped at 160. Resolves grid_l when grid_l_auto is set.
double resolve_auto_length(const RunConfig& cfg);

/// Reads initial samples from a text file: one "re im" pair per line,
/// exactly grid->num_points() lines.
SpectralField read_samples_file(const std::string& path, const GridPtr& grid);

/// CSV with header t,sup_norm,re_Q,im_Q,re_E,im_E,l2,h1, one row per
/// monitored sample, 17-significant-digit decimals, and trailing comment
/// lines for the termination class and blow-up estimate. Written atomically.
void write_timeseries(const TrajectoryRecord& traj, const std::string& path);

/// JSON document with stable key order: name, inputs, settings, metrics,
/// tolerances, verdict, artifacts, version. Written atomically; the writer
/// re-reads its own output to enforce the schema.
void write_report(const ExperimentReport& rep, const std::string& path);

/// Parses a report document, validating the schema.
ExperimentReport read_report(const std::string& path);

/// Shortest decimal form with up to 17 significant digits; round-trips
/// double precision exactly.
std::string format_double(double v);

/// Short form (6 significant digits) for parameter labels in file names and
/// metric keys.
std::string format_param(double v);

}  // namespace nnls
