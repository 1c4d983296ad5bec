#pragma once

#include <Eigen/Core>

namespace uavtraj {

/// Scalar-first quaternion (w, x, y, z) under the Hamilton product.
struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quat identity() { return {1.0, 0.0, 0.0, 0.0}; }
};

Quat quat_multiply(const Quat& a, const Quat& b);
Quat quat_conjugate(const Quat& q);
double quat_norm(const Quat& q);
Quat quat_normalized(const Quat& q);

/// q (0,v) q*; equals applying the body-to-local rotation of q.
/// Throws if q deviates from unit norm by more than 1e-6.
Eigen::Vector3d rotate_body_to_local(const Quat& q, const Eigen::Vector3d& v_body);

/// q* (0,v) q; inverse rotation of rotate_body_to_local.
Eigen::Vector3d rotate_local_to_body(const Quat& q, const Eigen::Vector3d& v_local);

/// Quaternion kinematics matrix: q_dot = 0.5 * gamma(q)^T * omega.
Eigen::Matrix<double, 3, 4> gamma_matrix(const Quat& q);

}  // namespace uavtraj
