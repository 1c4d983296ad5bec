#pragma once

#include <Eigen/Core>

#include "uavtraj/dynamics.hpp"
#include "uavtraj/environment.hpp"

namespace uavtraj {

/// Box constraints on states and controls. Position limits come from the
/// scenario workspace; the rest are the vehicle operating envelope.
struct BoxLimits {
  Eigen::Vector3d position_lower{-2.0, -2.0, 0.0};
  Eigen::Vector3d position_upper{2.0, 2.0, 2.0};
  double velocity_abs = 2.0;
  double qw_lower = 0.0;
  double qw_upper = 1.0;
  double q_vec_abs = 1.0;
  double thrust_lower = 0.0;
  double thrust_upper = 0.6;
  Eigen::Vector3d torque_abs{5.955e-3, 5.955e-3, 1.82063e-3};

  static BoxLimits for_scenario(const Scenario& scenario) {
    BoxLimits b;
    b.position_lower = scenario.workspace.lower;
    b.position_upper = scenario.workspace.upper;
    return b;
  }

  StateVec state_lower() const;
  StateVec state_upper() const;
  ControlVec control_lower() const;
  ControlVec control_upper() const;
};

/// Stabilized hover boundary conditions: rest at start and goal, identity
/// attitude, gravity-countering thrust, zero torque.
struct BoundaryConditions {
  UavState initial_state;
  UavState final_state;
  UavControl initial_control;
  UavControl final_control;

  static BoundaryConditions hover_to_hover(const Scenario& scenario,
                                           const UavParams& params);
};

}  // namespace uavtraj
