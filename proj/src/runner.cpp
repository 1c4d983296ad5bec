#include "uavtraj/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "uavtraj/io.hpp"

namespace uavtraj::run {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj, int samples) {
  std::ostringstream os;
  os << "t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,speed,thrust,taux,tauy,"
        "tauz\n";
  for (int j = 0; j < samples; ++j) {
    const double t =
        traj.t0 + (traj.tf - traj.t0) * j / static_cast<double>(samples - 1);
    const StateVec x = traj.state(t);
    const ControlVec u = traj.control(t);
    os << fmt(t);
    for (int c = 0; c < 13; ++c) os << ',' << fmt(x[c]);
    os << ',' << fmt(x.segment<3>(3).norm());
    for (int c = 0; c < 4; ++c) os << ',' << fmt(u[c]);
    os << '\n';
  }
  return os.str();
}

std::string colloc_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "segment,t,px,py,pz,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,thrust,taux,tauy,"
        "tauz\n";
  for (std::size_t s = 0; s < traj.segments.size(); ++s) {
    const auto& seg = traj.segments[s];
    for (int k = 0; k < seg.grid.times.size(); ++k) {
      os << s << ',' << fmt(seg.grid.times[k]);
      for (int c = 0; c < 13; ++c) os << ',' << fmt(seg.states(c, k));
      for (int c = 0; c < 4; ++c) os << ',' << fmt(seg.controls(c, k));
      os << '\n';
    }
  }
  return os.str();
}

std::string path_csv(const GridPath& path) {
  std::ostringstream os;
  os << "x,y\n";
  for (const auto& wp : path.waypoints) {
    os << fmt(wp.x()) << ',' << fmt(wp.y()) << '\n';
  }
  return os.str();
}

std::string row_csv(const metrics::EvaluationRow& row,
                    const std::string& status) {
  std::ostringstream os;
  os << "level,constrained,method,iterations,criterion,absolute_error,"
        "sum_violation,obstacle_violation,total_time,status\n";
  os << to_string(row.level) << ',' << (row.constrained ? "yes" : "no") << ','
     << to_string(row.method) << ',' << row.iterations << ','
     << fmt(row.criterion) << ',' << fmt(row.absolute_error) << ','
     << fmt(row.sum_violation) << ',' << fmt(row.obstacle_violation) << ','
     << fmt(row.total_time) << ',' << status << '\n';
  return os.str();
}

ordered_json mesh_json(const Mesh& mesh) {
  ordered_json segs = ordered_json::array();
  for (const MeshSegment& s : mesh.segments) {
    segs.push_back({{"degree", s.degree}, {"fraction", s.duration_fraction}});
  }
  return segs;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int exit_code_of(refine::PlanStatus status) {
  switch (status) {
    case refine::PlanStatus::kConverged:
      return kExitConverged;
    case refine::PlanStatus::kIterationLimit:
    case refine::PlanStatus::kTimeLimit:
      return kExitBudget;
    case refine::PlanStatus::kFailed:
      return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace

int run_plan(const RunConfig& config) {
  if (config.output_dir.empty()) {
    throw std::invalid_argument("run_plan: output directory missing");
  }
  if (config.refine.max_iterations < 1) {
    throw std::invalid_argument("run_plan: iteration budget must be >= 1");
  }
  const Scenario scenario = io::resolve_scenario(
      config.scenario_ref, config.random_count, config.seed);
  const UavParams params = UavParams::crazyflie();
  nlp::Weights weights = nlp::Weights::defaults();
  weights.smooth_quat_term = config.smooth_quat_term;

  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);

  refine::RefineOptions opts = config.refine;
  opts.solver.verbose = config.verbose;
  const refine::PlanResult result = refine::plan(
      scenario, params, config.method, config.level, config.constrained,
      opts, weights);

  metrics::EvaluationRow row;
  row.level = config.level;
  row.constrained = config.constrained;
  row.method = config.method;
  row.iterations = result.iterations;
  row.total_time = result.total_wall_time;
  const bool have_traj = !result.trajectory.segments.empty();
  if (have_traj) {
    row = metrics::evaluate(result, scenario, params, weights);
    io::write_text_file((out / "trajectory.csv").string(),
                        trajectory_csv(result.trajectory, 1000));
    io::write_text_file((out / "colloc_points.csv").string(),
                        colloc_csv(result.trajectory));
  }
  if (!result.seed_path.waypoints.empty()) {
    io::write_text_file((out / "path.csv").string(),
                        path_csv(result.seed_path));
  }
  io::write_text_file((out / "row.csv").string(),
                      row_csv(row, to_string(result.status)));

  // Per-iteration trajectory dumps for inspection.
  for (std::size_t i = 0; i < result.solves.size(); ++i) {
    try {
      const Trajectory t = nlp::extract_trajectory(
          result.solves[i].point, result.mesh_history[i],
          nlp::DecisionLayout(result.mesh_history[i]));
      char name[48];
      std::snprintf(name, sizeof(name), "traj_iter_%02zu.csv", i + 1);
      io::write_text_file((out / name).string(), trajectory_csv(t, 200));
    } catch (const std::exception&) {
      // degenerate iterate; skip the dump
    }
  }

  ordered_json j;
  j["schema_version"] = 1;
  j["config"] = {{"scenario", config.scenario_ref},
                 {"scenario_name", scenario.name},
                 {"method", to_string(config.method)},
                 {"level", to_string(config.level)},
                 {"constrained", config.constrained},
                 {"seed", config.seed},
                 {"random_count", config.random_count},
                 {"abs_tolerance", config.refine.abs_tolerance},
                 {"max_iterations", config.refine.max_iterations}};
  j["status"] = to_string(result.status);
  if (!result.failure_reason.empty()) {
    j["failure_reason"] = result.failure_reason;
  }
  j["iterations"] = result.iterations;
  j["eps_a_max"] = result.final_report.abs_max;
  j["eps_r_max"] = result.final_report.rel_max;
  if (have_traj) {
    j["tf"] = result.trajectory.tf;
  }
  ordered_json meshes = ordered_json::array();
  for (const Mesh& m : result.mesh_history) meshes.push_back(mesh_json(m));
  j["mesh_history"] = meshes;
  ordered_json solves = ordered_json::array();
  for (const auto& s : result.solves) {
    solves.push_back({{"status", solver::to_string(s.status)},
                      {"objective", s.objective},
                      {"max_constraint_violation", s.max_constraint_violation},
                      {"iterations", s.iterations}});
  }
  j["solves"] = solves;
  j["evaluation"] = {{"criterion", row.criterion},
                     {"absolute_error", row.absolute_error},
                     {"sum_violation", row.sum_violation},
                     {"obstacle_violation", row.obstacle_violation}};
  // Everything wall-clock dependent lives under this single key.
  ordered_json timing;
  timing["generated_at"] = timestamp_utc();
  timing["total_wall_time"] = result.total_wall_time;
  ordered_json solve_times = ordered_json::array();
  for (const auto& s : result.solves) solve_times.push_back(s.wall_time);
  timing["solve_wall_times"] = solve_times;
  j["timing"] = timing;
  io::write_text_file((out / "result.json").string(), j.dump(2) + "\n");

  return exit_code_of(result.status);
}

std::vector<BatchCellResult> run_batch(const RunConfig& base,
                                       const BatchSpec& spec,
                                       const std::string& out_root) {
  if (spec.levels.empty() || spec.methods.empty() ||
      spec.constrained_flags.empty()) {
    throw std::invalid_argument("run_batch: empty matrix axis");
  }
  fs::create_directories(out_root);

  std::vector<BatchCellResult> cells;
  for (const GuessLevel level : spec.levels) {
    for (const refine::Method method : spec.methods) {
      for (const bool constrained : spec.constrained_flags) {
        BatchCellResult cell;
        cell.config = base;
        cell.config.level = level;
        cell.config.method = method;
        cell.config.constrained = constrained;
        std::ostringstream dir;
        dir << to_string(level) << '_' << to_string(method) << '_'
            << (constrained ? "constr" : "free");
        cell.config.output_dir = (fs::path(out_root) / dir.str()).string();
        cells.push_back(std::move(cell));
      }
    }
  }

  const int workers =
      std::max(1, std::min<int>(spec.parallelism,
                                static_cast<int>(cells.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        cells[i].exit_code = run_plan(cells[i].config);
        std::string status;
        const std::string content = io::read_text_file(
            (fs::path(cells[i].config.output_dir) / "row.csv").string());
        cells[i].row = parse_row_csv(content, &status);
        cells[i].has_row = true;
      } catch (const std::exception&) {
        cells[i].exit_code = kExitFailure;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Aggregate in cell order so output is deterministic.
  std::vector<metrics::EvaluationRow> rows;
  std::ostringstream rows_csv;
  rows_csv << "level,constrained,method,iterations,criterion,absolute_error,"
              "sum_violation,obstacle_violation,total_time,exit_code\n";
  for (const BatchCellResult& cell : cells) {
    if (cell.has_row) rows.push_back(cell.row);
    rows_csv << to_string(cell.config.level) << ','
             << (cell.config.constrained ? "yes" : "no") << ','
             << to_string(cell.config.method) << ',';
    if (cell.has_row) {
      rows_csv << cell.row.iterations << ',' << fmt(cell.row.criterion) << ','
               << fmt(cell.row.absolute_error) << ','
               << fmt(cell.row.sum_violation) << ','
               << fmt(cell.row.obstacle_violation) << ','
               << fmt(cell.row.total_time);
    } else {
      rows_csv << ",,,,,";
    }
    rows_csv << ',' << cell.exit_code << '\n';
  }
  io::write_text_file((fs::path(out_root) / "rows.csv").string(),
                      rows_csv.str());
  if (!rows.empty()) {
    io::write_text_file((fs::path(out_root) / "table.txt").string(),
                        metrics::render_table(rows));
    io::write_text_file((fs::path(out_root) / "table.csv").string(),
                        metrics::render_csv(rows));
  }
  return cells;
}

metrics::EvaluationRow parse_row_csv(const std::string& content,
                                     std::string* status) {
  std::istringstream in(content);
  std::string header, line;
  if (!std::getline(in, header) || !std::getline(in, line)) {
    throw std::runtime_error("row.csv is truncated");
  }
  std::vector<std::string> fields;
  std::istringstream ls(line);
  std::string field;
  while (std::getline(ls, field, ',')) fields.push_back(field);
  if (fields.size() < 10) {
    throw std::runtime_error("row.csv has too few fields");
  }
  metrics::EvaluationRow row;
  const auto level = guess_level_from_string(fields[0]);
  const auto method = refine::method_from_string(fields[2]);
  if (!level || !method) {
    throw std::runtime_error("row.csv has bad enum values");
  }
  row.level = *level;
  row.constrained = fields[1] == "yes";
  row.method = *method;
  row.iterations = std::stoi(fields[3]);
  row.criterion = std::stod(fields[4]);
  row.absolute_error = std::stod(fields[5]);
  row.sum_violation = std::stod(fields[6]);
  row.obstacle_violation = std::stod(fields[7]);
  row.total_time = std::stod(fields[8]);
  if (status != nullptr) *status = fields[9];
  return row;
}

}  // namespace uavtraj::run
