#pragma once

#include <Eigen/Core>

#include "uavtraj/dual.hpp"
#include "uavtraj/quat.hpp"

namespace uavtraj {

/// Rigid-body state: local-frame position and velocity, attitude quaternion,
/// body-frame angular rate. Valid states carry a unit quaternion; collocation
/// states enforce that through an equality constraint instead.
struct UavState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Quat attitude = Quat::identity();
  Eigen::Vector3d angular_rate = Eigen::Vector3d::Zero();
};

/// Collective thrust along body z plus body torque. Thrust is nonnegative;
/// x/y thrust components of a quadrotor are structurally zero.
struct UavControl {
  double thrust_z = 0.0;
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
};

/// Crazyflie parameter set; drag_matrix is the lumped K_D.
struct UavParams {
  double gravity = 9.81305;
  double mass = 0.032;
  double arm_length = 0.0397;
  Eigen::Vector3d inertia_diag{6.410179e-6, 6.410179e-6, 9.860228e-6};
  double prop_diameter = 0.051;
  double max_flight_time = 180.0;
  Eigen::Matrix3d drag_matrix = Eigen::Matrix3d::Zero();

  static UavParams crazyflie();
};

// Flat layouts used by the transcription:
//   state   = [r(3), v(3), q(w,x,y,z), omega(3)]
//   control = [thrust_z, tau(3)]
using StateVec = Eigen::Matrix<double, 13, 1>;
using ControlVec = Eigen::Matrix<double, 4, 1>;
using DynamicsJacobian = Eigen::Matrix<double, 13, 17>;

StateVec pack_state(const UavState& x);
UavState unpack_state(const StateVec& v);
ControlVec pack_control(const UavControl& u);
UavControl unpack_control(const ControlVec& v);

/// Lumped aerodynamic force in the body frame:
/// F_A^B = -thrust_z * K_D * v_B with v_B the local velocity seen from body.
Eigen::Vector3d aero_force_body(const Quat& q, const Eigen::Vector3d& v_local,
                                double thrust_z, const UavParams& params);

/// Equations of motion. Throws if the quaternion deviates from unit norm
/// by more than 1e-6; unit norm is otherwise the NLP's responsibility.
StateVec state_derivative(const UavState& x, const UavControl& u,
                          const UavParams& params);

/// Same dynamics without the unit-norm gate; used by the transcription,
/// which evaluates at intermediate non-unit iterates.
StateVec state_derivative_raw(const StateVec& x, const ControlVec& u,
                              const UavParams& params);

/// Dynamics value plus the dense 13x17 Jacobian wrt (state, control),
/// computed by a forward-mode pass.
void state_derivative_jacobian(const StateVec& x, const ControlVec& u,
                               const UavParams& params, StateVec& f,
                               DynamicsJacobian& jac);

namespace detail {

/// q (0, v) q* for a general (not necessarily unit) quaternion.
/// bw carries the negated scalar part so the collapse stage is all-plus.
template <typename T>
void quat_sandwich(const T& qw, const T& qx, const T& qy, const T& qz,
                   const T* v, T* out) {
  const T bw = qx * v[0] + qy * v[1] + qz * v[2];
  const T bx = qw * v[0] + qy * v[2] - qz * v[1];
  const T by = qw * v[1] - qx * v[2] + qz * v[0];
  const T bz = qw * v[2] + qx * v[1] - qy * v[0];
  out[0] = bw * qx + bx * qw - by * qz + bz * qy;
  out[1] = bw * qy + bx * qz + by * qw - bz * qx;
  out[2] = bw * qz - bx * qy + by * qx + bz * qw;
}

// Templated core shared by the double and dual instantiations.
// x: r(0..2) v(3..5) q(6..9, wxyz) omega(10..12); u: thrust(0) tau(1..3).
template <typename T>
void dynamics_core(const T* x, const T* u, const UavParams& p, T* out) {
  const T* v = x + 3;
  const T qw = x[6], qx = x[7], qy = x[8], qz = x[9];
  const T* w = x + 10;
  const T thrust = u[0];
  const T* tau = u + 1;

  // v_B = q* (0, v) q
  T vb[3];
  quat_sandwich(qw, -qx, -qy, -qz, v, vb);

  // body force: collective thrust plus lumped drag
  const auto& kd = p.drag_matrix;
  T fb[3];
  for (int i = 0; i < 3; ++i) {
    fb[i] = -(thrust * (kd(i, 0) * vb[0] + kd(i, 1) * vb[1] + kd(i, 2) * vb[2]));
  }
  fb[2] += thrust;

  // F_L = q (0, F_B) q*
  T fl[3];
  quat_sandwich(qw, qx, qy, qz, fb, fl);

  // r_dot = v
  out[0] = v[0];
  out[1] = v[1];
  out[2] = v[2];

  // v_dot = -g e_z + F_L / m
  const double inv_m = 1.0 / p.mass;
  out[3] = fl[0] * inv_m;
  out[4] = fl[1] * inv_m;
  out[5] = fl[2] * inv_m - p.gravity;

  // q_dot = 0.5 * gamma(q)^T omega = 0.5 * q (0, omega)
  out[6] = 0.5 * (-(qx * w[0]) - qy * w[1] - qz * w[2]);
  out[7] = 0.5 * (qw * w[0] + qy * w[2] - qz * w[1]);
  out[8] = 0.5 * (qw * w[1] + qz * w[0] - qx * w[2]);
  out[9] = 0.5 * (qw * w[2] + qx * w[1] - qy * w[0]);

  // omega_dot = I^-1 (tau - omega x I omega), diagonal inertia
  const double ix = p.inertia_diag[0], iy = p.inertia_diag[1],
               iz = p.inertia_diag[2];
  const T cx = w[1] * (iz * w[2]) - w[2] * (iy * w[1]);
  const T cy = w[2] * (ix * w[0]) - w[0] * (iz * w[2]);
  const T cz = w[0] * (iy * w[1]) - w[1] * (ix * w[0]);
  out[10] = (tau[0] - cx) / ix;
  out[11] = (tau[1] - cy) / iy;
  out[12] = (tau[2] - cz) / iz;
}

}  // namespace detail

}  // namespace uavtraj
