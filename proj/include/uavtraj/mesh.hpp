#pragma once

#include <vector>

namespace uavtraj {

struct MeshSegment {
  int degree = 0;                  // polynomial degree, >= 3
  double duration_fraction = 0.0;  // share of (tf - t0), positive
};

/// Ordered segment list describing a PSM/PSEM discretization. A single
/// segment is plain PSM; several segments form a PSEM mesh joined by
/// continuity constraints.
struct Mesh {
  std::vector<MeshSegment> segments;

  int total_points() const;
  /// Throws unless fractions are positive and sum to 1 within 1e-12 and all
  /// degrees are >= 3.
  void validate() const;
  /// Cumulative fraction boundaries, size segments+1, first 0 and last 1.
  std::vector<double> boundaries() const;

  static Mesh single_segment(int degree);
  static Mesh uniform(int num_segments, int degree);
  static Mesh from_fractions(const std::vector<double>& fractions, int degree);
};

}  // namespace uavtraj
