#include "uavtraj/environment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace uavtraj {

GridMap GridMap::empty(int width, int height, double resolution,
                       const Eigen::Vector2d& origin) {
  if (width <= 0 || height <= 0 || resolution <= 0.0) {
    throw std::invalid_argument("grid map dimensions must be positive");
  }
  GridMap m;
  m.width = width;
  m.height = height;
  m.resolution = resolution;
  m.origin = origin;
  m.occupancy.assign(static_cast<std::size_t>(width) * height, 0);
  return m;
}

namespace env {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Squared distance from a point to an axis-aligned cell square.
double point_cell_dist_sq(const Eigen::Vector2d& p, const GridMap& map,
                          const Eigen::Vector2i& cell) {
  const Eigen::Vector2d lo = map.origin + map.resolution * cell.cast<double>();
  const Eigen::Vector2d hi =
      lo + Eigen::Vector2d::Constant(map.resolution);
  const double dx = std::max({lo.x() - p.x(), 0.0, p.x() - hi.x()});
  const double dy = std::max({lo.y() - p.y(), 0.0, p.y() - hi.y()});
  return dx * dx + dy * dy;
}

// Default workspace per the benchmark setup: 4 m x 4 m footprint, 2 m
// ceiling, 0.25 m grid whose cell centers land on the start/goal points.
Scenario base_scenario() {
  Scenario s;
  s.map = GridMap::empty(17, 17, 0.25, {-2.125, -2.125});
  s.workspace.lower = {-2.0, -2.0, 0.0};
  s.workspace.upper = {2.0, 2.0, 2.0};
  s.start = {-1.75, -1.75, 1.0};
  s.goal = {1.75, 1.75, 1.0};
  return s;
}

void add_column_cell(Scenario& s, const Eigen::Vector2i& cell) {
  s.map.set_occupied(cell, true);
  s.occupied_cells.push_back(cell);
  s.columns.push_back(column_from_cell(s.map, cell));
}

// 8-connected reachability on the inflated grid with strict corner rule;
// guarantees an any-angle route exists whenever this does.
bool route_exists(const GridMap& inflated, const Eigen::Vector2i& start,
                  const Eigen::Vector2i& goal) {
  if (!inflated.in_bounds(start) || !inflated.in_bounds(goal)) return false;
  if (inflated.occupied(start) || inflated.occupied(goal)) return false;
  std::vector<std::uint8_t> seen(
      static_cast<std::size_t>(inflated.width) * inflated.height, 0);
  auto idx = [&](const Eigen::Vector2i& c) {
    return static_cast<std::size_t>(c.y()) * inflated.width + c.x();
  };
  std::deque<Eigen::Vector2i> queue{start};
  seen[idx(start)] = 1;
  while (!queue.empty()) {
    const Eigen::Vector2i c = queue.front();
    queue.pop_front();
    if (c == goal) return true;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Eigen::Vector2i n(c.x() + dx, c.y() + dy);
        if (!inflated.in_bounds(n) || inflated.occupied(n)) continue;
        if (dx != 0 && dy != 0) {
          if (inflated.occupied({c.x() + dx, c.y()}) ||
              inflated.occupied({c.x(), c.y() + dy})) {
            continue;
          }
        }
        if (!seen[idx(n)]) {
          seen[idx(n)] = 1;
          queue.push_back(n);
        }
      }
    }
  }
  return false;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(splitmix64(seed ^ splitmix64(stream * 0xD1342543DE82EF95ULL))) {}

std::uint64_t CounterRng::next_u64() {
  return splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * ++counter_);
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
  return next_u64() % n;
}

double safety_radius(const UavParams& params) {
  return (params.arm_length + 0.5 * params.prop_diameter) * 1.1;
}

Column column_from_cell(const GridMap& map, const Eigen::Vector2i& cell) {
  if (!map.in_bounds(cell)) {
    throw std::invalid_argument("column_from_cell: cell out of range");
  }
  if (!map.occupied(cell)) {
    throw std::invalid_argument("column_from_cell: cell is free");
  }
  Column c;
  c.center = map.cell_center(cell);
  c.radius = 0.5 * std::numbers::sqrt2 * map.resolution;
  return c;
}

double obstacle_margin(const Eigen::Vector3d& position, const Column& column,
                       double r_safe) {
  const double dx = position.x() - column.center.x();
  const double dy = position.y() - column.center.y();
  const double r = column.radius + r_safe;
  return dx * dx + dy * dy - r * r;
}

GridMap inflate_for_planning(const GridMap& map,
                             const std::vector<Column>& columns,
                             double r_safe) {
  GridMap out = map;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const Eigen::Vector2i cell(x, y);
      if (out.occupied(cell)) continue;
      for (const Column& col : columns) {
        const double r = col.radius + r_safe;
        if (point_cell_dist_sq(col.center, map, cell) <= r * r) {
          out.set_occupied(cell, true);
          break;
        }
      }
    }
  }
  return out;
}

Scenario make_two_obstacle_scenario() {
  Scenario s = base_scenario();
  s.name = "two_obstacles";
  s.seed = 0;
  // Two columns between start and goal; the first straddles the straight
  // start-goal segment, the second leaves a gap to squeeze through.
  add_column_cell(s, {8, 9});    // center (0.00, 0.25)
  add_column_cell(s, {10, 7});   // center (0.50, -0.25)
  return s;
}

Scenario make_random_columns_scenario(int count, std::uint64_t seed) {
  if (count < 0) {
    throw std::invalid_argument("column count must be >= 0");
  }
  const UavParams params = UavParams::crazyflie();
  const double r_safe = safety_radius(params);
  constexpr int kMaxAttempts = 100;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Scenario s = base_scenario();
    s.name = "random_columns";
    s.seed = seed;
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
    const Eigen::Vector2i start_cell = s.map.cell_of(s.start.head<2>());
    const Eigen::Vector2i goal_cell = s.map.cell_of(s.goal.head<2>());

    const std::uint64_t num_cells =
        static_cast<std::uint64_t>(s.map.width) * s.map.height;
    int placed = 0;
    int draws = 0;
    const int max_draws = 200 * std::max(count, 1);
    while (placed < count && draws < max_draws) {
      ++draws;
      const std::uint64_t idx = rng.next_below(num_cells);
      const Eigen::Vector2i cell(static_cast<int>(idx % s.map.width),
                                 static_cast<int>(idx / s.map.width));
      if (s.map.occupied(cell)) continue;
      // Keep the start and goal cells clear of the inflated footprint.
      Column candidate;
      candidate.center = s.map.cell_center(cell);
      candidate.radius = 0.5 * std::numbers::sqrt2 * s.map.resolution;
      const double r = candidate.radius + r_safe;
      if (point_cell_dist_sq(candidate.center, s.map, start_cell) <= r * r ||
          point_cell_dist_sq(candidate.center, s.map, goal_cell) <= r * r) {
        continue;
      }
      add_column_cell(s, cell);
      ++placed;
    }
    if (placed < count) continue;

    const GridMap inflated = inflate_for_planning(s.map, s.columns, r_safe);
    if (route_exists(inflated, start_cell, goal_cell)) {
      return s;
    }
  }
  throw std::runtime_error(
      "make_random_columns_scenario: no feasible placement found");
}

}  // namespace env
}  // namespace uavtraj
