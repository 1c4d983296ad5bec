#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "uavtraj/environment.hpp"

namespace uavtraj {

/// Any-angle path over cell centers; legs are mutually visible.
struct GridPath {
  std::vector<Eigen::Vector2d> waypoints;  // world coordinates
  double cost = 0.0;                       // sum of Euclidean leg lengths
};

namespace lts {

/// Every cell the closed segment between the two cell centers touches,
/// including corner contacts (supercover), using exact integer arithmetic.
std::vector<Eigen::Vector2i> supercover_cells(const Eigen::Vector2i& a,
                                              const Eigen::Vector2i& b);

/// True iff no touched cell is occupied. Throws if an endpoint is out of
/// bounds.
bool line_of_sight(const GridMap& map, const Eigen::Vector2i& a,
                   const Eigen::Vector2i& b);

/// Lazy Theta*: A* over the 8-connected grid with lazy line-of-sight parent
/// reassignment on expansion. Euclidean heuristic; ties broken on (f, h,
/// cell index) so identical inputs give identical paths. Returns nullopt
/// when the goal is unreachable; throws if start or goal is occupied or out
/// of bounds.
std::optional<GridPath> plan(const GridMap& map, const Eigen::Vector2i& start,
                             const Eigen::Vector2i& goal);

}  // namespace lts
}  // namespace uavtraj
