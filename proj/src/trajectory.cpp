#include "uavtraj/trajectory.hpp"

#include <stdexcept>

namespace uavtraj {

int Trajectory::segment_index(double t) const {
  if (segments.empty()) {
    throw std::logic_error("trajectory has no segments");
  }
  if (t < t0 || t > tf) {
    throw std::invalid_argument("trajectory evaluated outside [t0, tf]");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (t <= segments[i].grid.tf) return static_cast<int>(i);
  }
  return static_cast<int>(segments.size()) - 1;
}

StateVec Trajectory::state(double t) const {
  const Segment& s = segments[segment_index(t)];
  return s.states * cheb::interpolation_coefficients(s.grid, t);
}

ControlVec Trajectory::control(double t) const {
  const Segment& s = segments[segment_index(t)];
  return s.controls * cheb::interpolation_coefficients(s.grid, t);
}

StateVec Trajectory::state_polynomial_derivative(double t) const {
  const Segment& s = segments[segment_index(t)];
  return s.state_derivs * cheb::interpolation_coefficients(s.grid, t);
}

std::vector<double> collocation_times(const Mesh& mesh, double t0, double tf) {
  mesh.validate();
  if (!(tf > t0)) {
    throw std::invalid_argument("collocation_times requires tf > t0");
  }
  const std::vector<double> b = mesh.boundaries();
  std::vector<double> times;
  times.reserve(mesh.total_points());
  const double span = tf - t0;
  for (std::size_t s = 0; s < mesh.segments.size(); ++s) {
    const double seg_t0 = t0 + b[s] * span;
    const double seg_tf = (s + 1 == mesh.segments.size()) ? tf
                                                          : t0 + b[s + 1] * span;
    const cheb::ScaledGrid grid =
        cheb::scale_grid(cheb::make_grid(mesh.segments[s].degree), seg_t0,
                         seg_tf);
    for (int k = 0; k < grid.times.size(); ++k) times.push_back(grid.times[k]);
  }
  return times;
}

}  // namespace uavtraj
