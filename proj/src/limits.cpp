#include "uavtraj/limits.hpp"

#include <limits>

namespace uavtraj {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StateVec BoxLimits::state_lower() const {
  StateVec lo;
  lo << position_lower, Eigen::Vector3d::Constant(-velocity_abs), qw_lower,
      Eigen::Vector3d::Constant(-q_vec_abs), Eigen::Vector3d::Constant(-kInf);
  return lo;
}

StateVec BoxLimits::state_upper() const {
  StateVec hi;
  hi << position_upper, Eigen::Vector3d::Constant(velocity_abs), qw_upper,
      Eigen::Vector3d::Constant(q_vec_abs), Eigen::Vector3d::Constant(kInf);
  return hi;
}

ControlVec BoxLimits::control_lower() const {
  ControlVec lo;
  lo << thrust_lower, -torque_abs;
  return lo;
}

ControlVec BoxLimits::control_upper() const {
  ControlVec hi;
  hi << thrust_upper, torque_abs;
  return hi;
}

BoundaryConditions BoundaryConditions::hover_to_hover(const Scenario& scenario,
                                                      const UavParams& params) {
  BoundaryConditions bc;
  bc.initial_state.position = scenario.start;
  bc.final_state.position = scenario.goal;
  bc.initial_control.thrust_z = params.mass * params.gravity;
  bc.final_control.thrust_z = bc.initial_control.thrust_z;
  return bc;
}

}  // namespace uavtraj
