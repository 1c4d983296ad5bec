// Command-line front end: scenario generation, single planning runs,
// batch evaluation matrices, and table rendering.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavtraj/io.hpp"
#include "uavtraj/runner.hpp"

namespace fs = std::filesystem;
using namespace uavtraj;

namespace {

std::string apply_output_root(const std::string& dir) {
  const char* root = std::getenv("UAVTRAJ_OUTPUT_ROOT");
  if (root == nullptr || dir.empty() || fs::path(dir).is_absolute()) {
    return dir;
  }
  return (fs::path(root) / dir).string();
}

int env_parallelism(int fallback) {
  const char* v = std::getenv("UAVTRAJ_PARALLELISM");
  if (v == nullptr) return fallback;
  const int n = std::atoi(v);
  return n >= 1 ? n : fallback;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct PlanFlags {
  run::RunConfig config;
  std::string level = "position";
  std::string method = "psm";
  bool unconstrained = false;
};

void add_plan_options(CLI::App* cmd, PlanFlags& flags) {
  cmd->add_option("--scenario", flags.config.scenario_ref,
                  "scenario file or builtin:two_obstacles / "
                  "builtin:random_columns");
  cmd->add_option("--level", flags.level,
                  "simple|position|velocity|orientation|angular_rate|"
                  "angular_rate_control");
  cmd->add_option("--method", flags.method, "psm|psem");
  cmd->add_flag("--unconstrained", flags.unconstrained,
                "skip clamping the guess to the boxes");
  cmd->add_option("--count", flags.config.random_count,
                  "columns for builtin:random_columns");
  cmd->add_option("--seed", flags.config.seed, "scenario seed");
  cmd->add_option("--max-iterations", flags.config.refine.max_iterations,
                  "refinement iteration budget");
  cmd->add_option("--wall-budget", flags.config.refine.wall_clock_budget,
                  "planning wall-clock budget, seconds");
  cmd->add_option("--abs-tolerance", flags.config.refine.abs_tolerance,
                  "stop threshold on eps_a_max");
  cmd->add_option("--psm-degree", flags.config.refine.psm_initial_degree,
                  "initial PSM polynomial degree");
  cmd->add_option("--psem-segments",
                  flags.config.refine.psem_default_segments,
                  "PSEM segment count when no path seeds the mesh");
  cmd->add_option("--solver-max-iterations",
                  flags.config.refine.solver.max_iterations,
                  "inner-iteration budget per NLP solve");
  cmd->add_option("--solver-constraint-tolerance",
                  flags.config.refine.solver.constraint_tolerance,
                  "NLP feasibility tolerance");
  cmd->add_option("--solver-optimality-tolerance",
                  flags.config.refine.solver.optimality_tolerance,
                  "NLP stationarity tolerance");
  cmd->add_option("--solver-wall-budget",
                  flags.config.refine.solver.wall_clock_budget,
                  "wall-clock budget per NLP solve, seconds");
  cmd->add_flag("--exact-quat-term",
                [&flags](std::int64_t) { flags.config.smooth_quat_term = false; },
                "use the nonsmooth |1 - q.qf| criterion term");
  cmd->add_flag("--verbose", flags.config.verbose, "print solver progress");
}

bool finish_plan_config(PlanFlags& flags, std::string& error) {
  const auto level = guess_level_from_string(flags.level);
  if (!level) {
    error = "unknown guess level: " + flags.level;
    return false;
  }
  const auto method = refine::method_from_string(flags.method);
  if (!method) {
    error = "unknown method: " + flags.method;
    return false;
  }
  flags.config.level = *level;
  flags.config.method = *method;
  flags.config.constrained = !flags.unconstrained;
  flags.config.output_dir = apply_output_root(flags.config.output_dir);
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev pseudospectral UAV trajectory planning toolkit"};
  app.require_subcommand(1);

  // scenario
  auto* scenario_cmd =
      app.add_subcommand("scenario", "generate a scenario file");
  std::string kind = "two_obstacles";
  int count = 30;
  std::uint64_t seed = 7;
  std::string scenario_out = "scenario.json";
  scenario_cmd->add_option("--kind", kind, "two_obstacles|random_columns");
  scenario_cmd->add_option("--count", count, "number of random columns");
  scenario_cmd->add_option("--seed", seed, "random seed");
  scenario_cmd->add_option("--out", scenario_out, "output file");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "run one planning job");
  PlanFlags plan_flags;
  add_plan_options(plan_cmd, plan_flags);
  plan_cmd->add_option("--out", plan_flags.config.output_dir,
                       "output directory")
      ->required();

  // batch
  auto* batch_cmd =
      app.add_subcommand("batch", "run a level x method x constraint matrix");
  PlanFlags batch_flags;
  add_plan_options(batch_cmd, batch_flags);
  std::string levels_arg =
      "position,velocity,orientation,angular_rate,angular_rate_control";
  std::string methods_arg = "psm,psem";
  std::string constrained_arg = "yes";
  std::string batch_out;
  int parallel = env_parallelism(1);
  batch_cmd->add_option("--levels", levels_arg, "comma-separated guess levels");
  batch_cmd->add_option("--methods", methods_arg, "comma-separated methods");
  batch_cmd->add_option("--constrained", constrained_arg,
                        "comma-separated yes/no flags");
  batch_cmd->add_option("--parallel", parallel, "worker count");
  batch_cmd->add_option("--out", batch_out, "output root directory")
      ->required();

  // report
  auto* report_cmd =
      app.add_subcommand("report", "re-render a table from row.csv files");
  std::vector<std::string> row_files;
  std::string report_out;
  report_cmd->add_option("--rows", row_files, "row.csv files")->required();
  report_cmd->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : run::kExitUsage;
  }

  try {
    if (*scenario_cmd) {
      Scenario s;
      if (kind == "two_obstacles") {
        s = env::make_two_obstacle_scenario();
      } else if (kind == "random_columns") {
        s = env::make_random_columns_scenario(count, seed);
      } else {
        std::fprintf(stderr, "unknown scenario kind: %s\n", kind.c_str());
        return run::kExitUsage;
      }
      const std::string out = apply_output_root(scenario_out);
      io::save_scenario(s, out);
      std::printf("scenario '%s': %zu columns, start (%g, %g, %g), goal "
                  "(%g, %g, %g) -> %s\n",
                  s.name.c_str(), s.columns.size(), s.start.x(), s.start.y(),
                  s.start.z(), s.goal.x(), s.goal.y(), s.goal.z(),
                  out.c_str());
      return 0;
    }

    if (*plan_cmd) {
      std::string error;
      if (!finish_plan_config(plan_flags, error)) {
        std::fprintf(stderr, "%s\n", error.c_str());
        return run::kExitUsage;
      }
      try {
        const int code = run::run_plan(plan_flags.config);
        std::printf("plan finished with exit code %d; outputs in %s\n", code,
                    plan_flags.config.output_dir.c_str());
        return code;
      } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return run::kExitUsage;
      }
    }

    if (*batch_cmd) {
      std::string error;
      if (!finish_plan_config(batch_flags, error)) {
        std::fprintf(stderr, "%s\n", error.c_str());
        return run::kExitUsage;
      }
      run::BatchSpec spec;
      for (const std::string& name : split_list(levels_arg)) {
        const auto level = guess_level_from_string(name);
        if (!level) {
          std::fprintf(stderr, "unknown guess level: %s\n", name.c_str());
          return run::kExitUsage;
        }
        spec.levels.push_back(*level);
      }
      for (const std::string& name : split_list(methods_arg)) {
        const auto method = refine::method_from_string(name);
        if (!method) {
          std::fprintf(stderr, "unknown method: %s\n", name.c_str());
          return run::kExitUsage;
        }
        spec.methods.push_back(*method);
      }
      for (const std::string& name : split_list(constrained_arg)) {
        if (name != "yes" && name != "no") {
          std::fprintf(stderr, "constrained flags must be yes/no\n");
          return run::kExitUsage;
        }
        spec.constrained_flags.push_back(name == "yes");
      }
      spec.parallelism = parallel;
      const std::string out = apply_output_root(batch_out);
      const auto cells = run::run_batch(batch_flags.config, spec, out);
      int failures = 0;
      for (const auto& cell : cells) {
        if (cell.exit_code == run::kExitFailure) ++failures;
      }
      std::printf("batch finished: %zu cells, %d failures; outputs in %s\n",
                  cells.size(), failures, out.c_str());
      return failures == static_cast<int>(cells.size()) ? run::kExitFailure
                                                        : 0;
    }

    if (*report_cmd) {
      std::vector<metrics::EvaluationRow> rows;
      for (const std::string& file : row_files) {
        rows.push_back(run::parse_row_csv(io::read_text_file(file)));
      }
      const std::string out = apply_output_root(report_out);
      fs::create_directories(out);
      io::write_text_file((fs::path(out) / "table.txt").string(),
                          metrics::render_table(rows));
      io::write_text_file((fs::path(out) / "table.csv").string(),
                          metrics::render_csv(rows));
      std::printf("report written to %s\n", out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return run::kExitFailure;
  }
  return run::kExitUsage;
}
