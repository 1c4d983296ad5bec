#include "uavtraj/lazy_theta_star.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <queue>
#include <stdexcept>

namespace uavtraj::lts {

std::vector<Eigen::Vector2i> supercover_cells(const Eigen::Vector2i& a,
                                              const Eigen::Vector2i& b) {
  std::vector<Eigen::Vector2i> cells;
  const long long dx = b.x() - a.x();
  const long long dy = b.y() - a.y();
  const long long adx = std::llabs(dx);
  const long long ady = std::llabs(dy);
  const int sx = dx > 0 ? 1 : -1;
  const int sy = dy > 0 ? 1 : -1;

  int cx = a.x();
  int cy = a.y();
  cells.push_back({cx, cy});
  long long i = 1;  // next vertical boundary index
  long long j = 1;  // next horizontal boundary index
  while (i <= adx || j <= ady) {
    bool step_x;
    if (j > ady) {
      step_x = true;
    } else if (i > adx) {
      step_x = false;
    } else {
      // Crossing parameters (2i-1)/(2 adx) vs (2j-1)/(2 ady), compared
      // exactly by cross-multiplication; cell centers sit at half-integers
      // so a tie is a true corner crossing.
      const long long lhs = (2 * i - 1) * ady;
      const long long rhs = (2 * j - 1) * adx;
      if (lhs == rhs) {
        cells.push_back({cx + sx, cy});
        cells.push_back({cx, cy + sy});
        cx += sx;
        cy += sy;
        ++i;
        ++j;
        cells.push_back({cx, cy});
        continue;
      }
      step_x = lhs < rhs;
    }
    if (step_x) {
      cx += sx;
      ++i;
    } else {
      cy += sy;
      ++j;
    }
    cells.push_back({cx, cy});
  }
  return cells;
}

bool line_of_sight(const GridMap& map, const Eigen::Vector2i& a,
                   const Eigen::Vector2i& b) {
  if (!map.in_bounds(a) || !map.in_bounds(b)) {
    throw std::invalid_argument("line_of_sight: endpoint out of bounds");
  }
  for (const Eigen::Vector2i& c : supercover_cells(a, b)) {
    if (!map.in_bounds(c) || map.occupied(c)) return false;
  }
  return true;
}

namespace {

struct OpenEntry {
  double f;
  double h;
  double g;  // snapshot; entries whose g disagrees with the node are stale
  int index;
};

struct OpenCompare {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.index > b.index;
  }
};

}  // namespace

std::optional<GridPath> plan(const GridMap& map, const Eigen::Vector2i& start,
                             const Eigen::Vector2i& goal) {
  if (!map.in_bounds(start) || !map.in_bounds(goal)) {
    throw std::invalid_argument("plan: start or goal out of bounds");
  }
  if (map.occupied(start) || map.occupied(goal)) {
    throw std::invalid_argument("plan: start or goal occupied");
  }

  const int w = map.width;
  const int n = w * map.height;
  auto idx = [w](const Eigen::Vector2i& c) { return c.y() * w + c.x(); };
  auto cell = [w](int i) { return Eigen::Vector2i(i % w, i / w); };
  auto heuristic = [&](const Eigen::Vector2i& c) {
    return (goal - c).cast<double>().norm();
  };
  auto dist = [](const Eigen::Vector2i& a, const Eigen::Vector2i& b) {
    return (b - a).cast<double>().norm();
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenCompare> open;

  const int start_i = idx(start);
  const int goal_i = idx(goal);
  g[start_i] = 0.0;
  parent[start_i] = start_i;
  open.push({heuristic(start), heuristic(start), 0.0, start_i});

  std::vector<int> closed_order;
  closed_order.reserve(n);

  // Best-first search over cell centers with every line-of-sight check
  // deferred to expansion. Settling a node proposes optimistic straight-line
  // keys to the still-open cells (visibility assumed, as in the lazy
  // Theta* update); a popped node is verified against the settled set and
  // re-queued under its corrected key when the optimism does not hold.
  // Keys therefore never overestimate the best settleable value, which
  // keeps the settled costs exact for the center visibility graph.
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const int s = top.index;
    if (closed[s] || top.g != g[s]) continue;  // stale entry
    const Eigen::Vector2i sc = cell(s);

    if (s != start_i) {
      // Verification: the best settled vertex that can actually see s.
      double best = kInf;
      int best_parent = -1;
      for (const int a : closed_order) {
        const double cand = g[a] + dist(cell(a), sc);
        if (cand >= best) continue;
        if (line_of_sight(map, cell(a), sc)) {
          best = cand;
          best_parent = a;
        }
      }
      if (best_parent < 0) {
        // No settled support yet; forget the optimistic estimate so later
        // proposals can reach this node again.
        g[s] = kInf;
        parent[s] = -1;
        continue;
      }
      if (best > g[s]) {
        g[s] = best;
        parent[s] = best_parent;
        open.push({best + top.h, top.h, best, s});
        continue;
      }
      g[s] = best;
      parent[s] = best_parent;
    }

    closed[s] = 1;
    closed_order.push_back(s);
    if (s == goal_i) break;

    for (int t = 0; t < n; ++t) {
      if (closed[t]) continue;
      const Eigen::Vector2i tc = cell(t);
      if (map.occupied(tc)) continue;
      const double cand = g[s] + dist(sc, tc);
      if (cand < g[t]) {
        g[t] = cand;
        parent[t] = s;
        const double h = heuristic(tc);
        open.push({cand + h, h, cand, t});
      }
    }
  }

  if (!closed[goal_i]) return std::nullopt;

  std::vector<Eigen::Vector2i> chain;
  for (int c = goal_i; c != parent[c]; c = parent[c]) chain.push_back(cell(c));
  chain.push_back(start);
  std::reverse(chain.begin(), chain.end());

  // Equal-cost supports can insert vertices that lie exactly on the
  // surrounding leg; merging them keeps the same swept cells.
  std::vector<Eigen::Vector2i> pruned{chain.front()};
  for (std::size_t k = 1; k + 1 < chain.size(); ++k) {
    const Eigen::Vector2i a = pruned.back();
    const Eigen::Vector2i b = chain[k];
    const Eigen::Vector2i c = chain[k + 1];
    const long long cross =
        static_cast<long long>(b.x() - a.x()) * (c.y() - a.y()) -
        static_cast<long long>(b.y() - a.y()) * (c.x() - a.x());
    const long long along =
        static_cast<long long>(b.x() - a.x()) * (c.x() - b.x()) +
        static_cast<long long>(b.y() - a.y()) * (c.y() - b.y());
    if (cross != 0 || along < 0) pruned.push_back(b);
  }
  pruned.push_back(chain.back());

  GridPath path;
  path.waypoints.reserve(pruned.size());
  for (const Eigen::Vector2i& c : pruned) {
    path.waypoints.push_back(map.cell_center(c));
  }
  for (std::size_t k = 1; k < path.waypoints.size(); ++k) {
    path.cost += (path.waypoints[k] - path.waypoints[k - 1]).norm();
  }
  return path;
}

}  // namespace uavtraj::lts
