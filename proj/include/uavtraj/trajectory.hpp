#pragma once

#include <Eigen/Core>
#include <vector>

#include "uavtraj/cheb.hpp"
#include "uavtraj/dynamics.hpp"
#include "uavtraj/mesh.hpp"

namespace uavtraj {

/// Per-segment polynomial representation of state and control over
/// [t0, tf]; evaluable anywhere inside that span.
struct Trajectory {
  struct Segment {
    cheb::ScaledGrid grid;
    Eigen::Matrix<double, 13, Eigen::Dynamic> states;
    Eigen::Matrix<double, 4, Eigen::Dynamic> controls;
    // Interpolant-derivative samples, states * scaled_diff^T; a degree-N
    // interpolant re-represents its own degree N-1 derivative exactly.
    Eigen::Matrix<double, 13, Eigen::Dynamic> state_derivs;
  };

  double t0 = 0.0;
  double tf = 0.0;
  std::vector<Segment> segments;

  /// Segment containing t; interface times resolve to the earlier segment.
  /// Throws if t lies outside [t0, tf].
  int segment_index(double t) const;

  StateVec state(double t) const;
  ControlVec control(double t) const;
  /// Time derivative of the state interpolant (not the dynamics).
  StateVec state_polynomial_derivative(double t) const;
};

/// Times of all collocation points for a mesh spanning [t0, tf],
/// segment-major; interface times appear once per adjoining segment.
std::vector<double> collocation_times(const Mesh& mesh, double t0, double tf);

}  // namespace uavtraj
