#pragma once

#include <string>
#include <vector>

#include "uavtraj/metrics.hpp"
#include "uavtraj/refine.hpp"

namespace uavtraj::run {

/// Everything a single planning run needs. Mirrors the CLI flags.
struct RunConfig {
  std::string scenario_ref = "builtin:two_obstacles";
  refine::Method method = refine::Method::kPsm;
  GuessLevel level = GuessLevel::kPosition;
  bool constrained = true;
  int random_count = 30;
  std::uint64_t seed = 7;
  refine::RefineOptions refine;
  // Smoothed quaternion-distance term for the reference solver; the exact
  // absolute-value form is available for solvers that can handle it.
  bool smooth_quat_term = true;
  std::string output_dir;
  bool verbose = false;
};

// Exit codes shared with the CLI.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitUsage = 64;

/// Run one plan and write result.json, trajectory.csv, colloc_points.csv,
/// path.csv, row.csv and per-iteration trajectory dumps into output_dir.
/// Returns kExitConverged / kExitBudget / kExitFailure.
int run_plan(const RunConfig& config);

struct BatchSpec {
  std::vector<GuessLevel> levels;
  std::vector<refine::Method> methods;
  std::vector<bool> constrained_flags;
  int parallelism = 1;
};

struct BatchCellResult {
  RunConfig config;
  int exit_code = kExitFailure;
  bool has_row = false;
  metrics::EvaluationRow row;
};

/// Run the level x method x constrained matrix (cells in deterministic
/// order, parallel up to the given limit), aggregate rows, and write
/// table.txt / table.csv / rows.csv under out_root. Cell failures are
/// recorded and do not abort the batch.
std::vector<BatchCellResult> run_batch(const RunConfig& base,
                                       const BatchSpec& spec,
                                       const std::string& out_root);

/// Parse a row.csv written by run_plan (header plus one line).
metrics::EvaluationRow parse_row_csv(const std::string& content,
                                     std::string* status = nullptr);

}  // namespace uavtraj::run
