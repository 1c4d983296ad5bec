#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "uavtraj/dynamics.hpp"

namespace uavtraj {

/// 2D occupancy grid. origin is the world position of the lower-left corner
/// of cell (0, 0); cell (i, j) spans origin + resolution * [i, i+1] x [j, j+1].
struct GridMap {
  int width = 0;
  int height = 0;
  double resolution = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  std::vector<std::uint8_t> occupancy;  // row-major by y

  bool in_bounds(const Eigen::Vector2i& cell) const {
    return cell.x() >= 0 && cell.x() < width && cell.y() >= 0 &&
           cell.y() < height;
  }
  bool occupied(const Eigen::Vector2i& cell) const {
    return occupancy[static_cast<std::size_t>(cell.y()) * width + cell.x()] !=
           0;
  }
  void set_occupied(const Eigen::Vector2i& cell, bool value) {
    occupancy[static_cast<std::size_t>(cell.y()) * width + cell.x()] =
        value ? 1 : 0;
  }
  Eigen::Vector2d cell_center(const Eigen::Vector2i& cell) const {
    return origin + resolution * (cell.cast<double>() +
                                  Eigen::Vector2d::Constant(0.5));
  }
  Eigen::Vector2i cell_of(const Eigen::Vector2d& point) const {
    return {static_cast<int>(std::floor((point.x() - origin.x()) / resolution)),
            static_cast<int>(std::floor((point.y() - origin.y()) / resolution))};
  }

  static GridMap empty(int width, int height, double resolution,
                       const Eigen::Vector2d& origin);
};

/// Infinite cylindrical column obstacle, described by its footprint.
struct Column {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
};

struct Box3 {
  Eigen::Vector3d lower = Eigen::Vector3d::Zero();
  Eigen::Vector3d upper = Eigen::Vector3d::Zero();
};

/// Workspace description shared by the grid planner and the NLP. Columns and
/// occupied cells are generated together so the two views stay consistent.
struct Scenario {
  std::string name;
  GridMap map;
  std::vector<Eigen::Vector2i> occupied_cells;
  std::vector<Column> columns;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  Box3 workspace;
  std::uint64_t seed = 0;
};

namespace env {

/// Deterministic counter-based generator (splitmix64 in counter mode).
/// Same seed and draw sequence give identical output on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);
  std::uint64_t next_u64();
  /// Uniform draw in [0, n).
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Inflation radius around the vehicle: (arm + prop/2) * 1.1.
double safety_radius(const UavParams& params);

/// Analytic column circumscribing an occupied cell. Throws if the cell is
/// free or out of range.
Column column_from_cell(const GridMap& map, const Eigen::Vector2i& cell);

/// Signed clearance of a position from an inflated column footprint:
/// (x-xc)^2 + (y-yc)^2 - (r_obs + r_safe)^2; feasible iff >= 0.
double obstacle_margin(const Eigen::Vector3d& position, const Column& column,
                       double r_safe);

/// Copy of the map with every cell reachable by the inflated footprint of
/// some column marked occupied; the grid planner runs on this view.
GridMap inflate_for_planning(const GridMap& map,
                             const std::vector<Column>& columns,
                             double r_safe);

Scenario make_two_obstacle_scenario();

/// Uniformly drawn columns over the grid; cells blocking start or goal are
/// rejected and full placements without a start-goal route are retried.
/// Throws after bounded retries.
Scenario make_random_columns_scenario(int count, std::uint64_t seed);

}  // namespace env
}  // namespace uavtraj
