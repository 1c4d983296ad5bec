#include "uavtraj/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace uavtraj {

UavParams UavParams::crazyflie() {
  UavParams p;
  p.drag_matrix << 10.2506, 0.3177, 0.4332,
                   0.3177, 10.2506, 0.4332,
                   7.7050, 7.7050, 7.5530;
  p.drag_matrix *= -1e-7;
  return p;
}

StateVec pack_state(const UavState& x) {
  StateVec v;
  v << x.position, x.velocity, x.attitude.w, x.attitude.x, x.attitude.y,
      x.attitude.z, x.angular_rate;
  return v;
}

UavState unpack_state(const StateVec& v) {
  UavState x;
  x.position = v.segment<3>(0);
  x.velocity = v.segment<3>(3);
  x.attitude = {v[6], v[7], v[8], v[9]};
  x.angular_rate = v.segment<3>(10);
  return x;
}

ControlVec pack_control(const UavControl& u) {
  ControlVec v;
  v << u.thrust_z, u.torque;
  return v;
}

UavControl unpack_control(const ControlVec& v) {
  UavControl u;
  u.thrust_z = v[0];
  u.torque = v.segment<3>(1);
  return u;
}

Eigen::Vector3d aero_force_body(const Quat& q, const Eigen::Vector3d& v_local,
                                double thrust_z, const UavParams& params) {
  const Eigen::Vector3d v_body = rotate_local_to_body(q, v_local);
  return -thrust_z * (params.drag_matrix * v_body);
}

StateVec state_derivative(const UavState& x, const UavControl& u,
                          const UavParams& params) {
  if (std::abs(quat_norm(x.attitude) - 1.0) > 1e-6) {
    throw std::invalid_argument("state_derivative requires a unit quaternion");
  }
  return state_derivative_raw(pack_state(x), pack_control(u), params);
}

StateVec state_derivative_raw(const StateVec& x, const ControlVec& u,
                              const UavParams& params) {
  StateVec out;
  detail::dynamics_core(x.data(), u.data(), params, out.data());
  return out;
}

void state_derivative_jacobian(const StateVec& x, const ControlVec& u,
                               const UavParams& params, StateVec& f,
                               DynamicsJacobian& jac) {
  using D = Dual<17>;
  D xd[13];
  D ud[4];
  for (int i = 0; i < 13; ++i) xd[i] = D::seeded(x[i], i);
  for (int i = 0; i < 4; ++i) ud[i] = D::seeded(u[i], 13 + i);
  D out[13];
  detail::dynamics_core(xd, ud, params, out);
  for (int r = 0; r < 13; ++r) {
    f[r] = out[r].v;
    for (int c = 0; c < 17; ++c) jac(r, c) = out[r].d[c];
  }
}

}  // namespace uavtraj
