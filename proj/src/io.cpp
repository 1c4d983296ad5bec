#include "uavtraj/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace uavtraj::io {

using ordered_json = nlohmann::ordered_json;

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  ordered_json j;
  j["schema_version"] = 1;
  j["name"] = scenario.name;
  j["seed"] = scenario.seed;
  j["grid"] = {{"width", scenario.map.width},
               {"height", scenario.map.height},
               {"resolution", scenario.map.resolution},
               {"origin", {scenario.map.origin.x(), scenario.map.origin.y()}}};
  j["workspace"] = {
      {"lower", {scenario.workspace.lower.x(), scenario.workspace.lower.y(),
                 scenario.workspace.lower.z()}},
      {"upper", {scenario.workspace.upper.x(), scenario.workspace.upper.y(),
                 scenario.workspace.upper.z()}}};
  j["start"] = {scenario.start.x(), scenario.start.y(), scenario.start.z()};
  j["goal"] = {scenario.goal.x(), scenario.goal.y(), scenario.goal.z()};
  ordered_json cells = ordered_json::array();
  for (const auto& c : scenario.occupied_cells) {
    cells.push_back({c.x(), c.y()});
  }
  j["occupied_cells"] = cells;
  ordered_json cols = ordered_json::array();
  for (const auto& col : scenario.columns) {
    cols.push_back({{"center", {col.center.x(), col.center.y()}},
                    {"radius", col.radius}});
  }
  j["columns"] = cols;
  write_text_file(path, j.dump(2) + "\n");
}

Scenario load_scenario(const std::string& path) {
  const ordered_json j = ordered_json::parse(read_text_file(path));
  if (j.at("schema_version").get<int>() != 1) {
    throw std::runtime_error("unsupported scenario schema version");
  }
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  const auto& grid = j.at("grid");
  s.map = GridMap::empty(
      grid.at("width").get<int>(), grid.at("height").get<int>(),
      grid.at("resolution").get<double>(),
      {grid.at("origin")[0].get<double>(), grid.at("origin")[1].get<double>()});
  const auto& ws = j.at("workspace");
  for (int c = 0; c < 3; ++c) {
    s.workspace.lower[c] = ws.at("lower")[c].get<double>();
    s.workspace.upper[c] = ws.at("upper")[c].get<double>();
  }
  for (int c = 0; c < 3; ++c) {
    s.start[c] = j.at("start")[c].get<double>();
    s.goal[c] = j.at("goal")[c].get<double>();
  }
  for (const auto& cell : j.at("occupied_cells")) {
    const Eigen::Vector2i c(cell[0].get<int>(), cell[1].get<int>());
    if (!s.map.in_bounds(c)) {
      throw std::runtime_error("scenario cell out of bounds");
    }
    s.map.set_occupied(c, true);
    s.occupied_cells.push_back(c);
  }
  std::size_t i = 0;
  for (const auto& col : j.at("columns")) {
    Column c;
    c.center = {col.at("center")[0].get<double>(),
                col.at("center")[1].get<double>()};
    c.radius = col.at("radius").get<double>();
    if (i >= s.occupied_cells.size()) {
      throw std::runtime_error("scenario has more columns than cells");
    }
    const Column derived = env::column_from_cell(s.map, s.occupied_cells[i]);
    if ((derived.center - c.center).norm() > 1e-9 ||
        std::abs(derived.radius - c.radius) > 1e-9) {
      throw std::runtime_error("scenario columns disagree with occupancy");
    }
    s.columns.push_back(c);
    ++i;
  }
  if (s.columns.size() != s.occupied_cells.size()) {
    throw std::runtime_error("scenario cell/column count mismatch");
  }
  return s;
}

Scenario resolve_scenario(const std::string& reference, int random_count,
                          std::uint64_t seed) {
  if (reference == "builtin:two_obstacles") {
    return env::make_two_obstacle_scenario();
  }
  if (reference == "builtin:random_columns") {
    return env::make_random_columns_scenario(random_count, seed);
  }
  return load_scenario(reference);
}

}  // namespace uavtraj::io
