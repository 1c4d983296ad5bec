#include "uavtraj/quat.hpp"

#include <cmath>
#include <stdexcept>

namespace uavtraj {

Quat quat_multiply(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quat quat_conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

double quat_norm(const Quat& q) {
  return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

Quat quat_normalized(const Quat& q) {
  const double n = quat_norm(q);
  if (n == 0.0) {
    throw std::invalid_argument("cannot normalize a zero quaternion");
  }
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

namespace {
void check_unit(const Quat& q) {
  if (std::abs(quat_norm(q) - 1.0) > 1e-6) {
    throw std::invalid_argument("quaternion is not unit norm");
  }
}
}  // namespace

Eigen::Vector3d rotate_body_to_local(const Quat& q,
                                     const Eigen::Vector3d& v_body) {
  check_unit(q);
  const Quat p{0.0, v_body.x(), v_body.y(), v_body.z()};
  const Quat r = quat_multiply(quat_multiply(q, p), quat_conjugate(q));
  return {r.x, r.y, r.z};
}

Eigen::Vector3d rotate_local_to_body(const Quat& q,
                                     const Eigen::Vector3d& v_local) {
  check_unit(q);
  const Quat p{0.0, v_local.x(), v_local.y(), v_local.z()};
  const Quat r = quat_multiply(quat_multiply(quat_conjugate(q), p), q);
  return {r.x, r.y, r.z};
}

Eigen::Matrix<double, 3, 4> gamma_matrix(const Quat& q) {
  Eigen::Matrix<double, 3, 4> g;
  g << -q.x, q.w, q.z, -q.y,
       -q.y, -q.z, q.w, q.x,
       -q.z, q.y, -q.x, q.w;
  return g;
}

}  // namespace uavtraj
