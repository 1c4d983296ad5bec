#include "uavtraj/transcribe.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "uavtraj/cheb.hpp"

namespace uavtraj::nlp {

Weights Weights::defaults() {
  Weights w;
  w.q_state << 1, 1, 1, 1, 1, 1, 0.328, 0.328, 0.328;
  w.q_quat = 100.0;
  w.r_control << 1.223e1, 2.820e4, 2.820e4, 3.017e5;
  return w;
}

DecisionLayout::DecisionLayout(const Mesh& mesh) {
  mesh.validate();
  int start = 0;
  for (const MeshSegment& s : mesh.segments) {
    points_per_segment_.push_back(s.degree + 1);
    segment_start_.push_back(start);
    start += s.degree + 1;
  }
  total_points_ = start;
  dimension_ = 2 + 17 * total_points_;
}

DecisionLayout::Location DecisionLayout::locate(int index) const {
  if (index < 0 || index >= dimension_) {
    throw std::out_of_range("decision index out of range");
  }
  Location loc;
  if (index == 0) {
    loc.kind = Location::Kind::kT0;
    return loc;
  }
  if (index == 1) {
    loc.kind = Location::Kind::kTf;
    return loc;
  }
  int rest = index - 2;
  int global_point;
  if (rest < 13 * total_points_) {
    loc.kind = Location::Kind::kState;
    global_point = rest / 13;
    loc.channel = rest % 13;
  } else {
    loc.kind = Location::Kind::kControl;
    rest -= 13 * total_points_;
    global_point = rest / 4;
    loc.channel = rest % 4;
  }
  for (int s = static_cast<int>(segment_start_.size()) - 1; s >= 0; --s) {
    if (global_point >= segment_start_[s]) {
      loc.segment = s;
      loc.point = global_point - segment_start_[s];
      break;
    }
  }
  return loc;
}

int DecisionLayout::index_of(const Location& loc) const {
  switch (loc.kind) {
    case Location::Kind::kT0:
      return 0;
    case Location::Kind::kTf:
      return 1;
    case Location::Kind::kState:
      return state_offset(loc.segment, loc.point) + loc.channel;
    case Location::Kind::kControl:
      return control_offset(loc.segment, loc.point) + loc.channel;
  }
  throw std::logic_error("bad location kind");
}

std::string DecisionLayout::describe(int index) const {
  const Location loc = locate(index);
  std::ostringstream os;
  switch (loc.kind) {
    case Location::Kind::kT0:
      os << "t0";
      break;
    case Location::Kind::kTf:
      os << "tf";
      break;
    case Location::Kind::kState:
      os << "state[s" << loc.segment << ",p" << loc.point << ",c"
         << loc.channel << "]";
      break;
    case Location::Kind::kControl:
      os << "control[s" << loc.segment << ",p" << loc.point << ",c"
         << loc.channel << "]";
      break;
  }
  return os.str();
}

namespace {

// The angular-rate defect rows carry the inertia inverse (~1e5); scaling
// them keeps the constraint Jacobian balanced against the other rows.
constexpr double kOmegaRowScale = 1e-2;

Eigen::Matrix<double, 13, 1> defect_row_scale() {
  Eigen::Matrix<double, 13, 1> s = Eigen::Matrix<double, 13, 1>::Ones();
  s[10] = kOmegaRowScale;
  s[11] = kOmegaRowScale;
  s[12] = kOmegaRowScale;
  return s;
}

struct Context {
  Mesh mesh;
  DecisionLayout layout;
  UavParams params;
  Weights weights;
  std::vector<cheb::CollocationGrid> grids;
  std::vector<double> fractions;
  StateVec x_initial, x_final;
  ControlVec u_initial, u_final;
  std::vector<Eigen::Vector2d> column_centers;
  std::vector<double> inflated_radius_sq;
  Eigen::Matrix<double, 13, 1> row_scale = defect_row_scale();

  int num_points = 0;
  int eq_quat_offset = 0;
  int eq_boundary_offset = 0;
  int eq_continuity_offset = 0;
  int num_equalities = 0;
  int num_inequalities = 0;

  using StateBlock = Eigen::Map<const Eigen::Matrix<double, 13, Eigen::Dynamic>>;
  using ControlBlock = Eigen::Map<const Eigen::Matrix<double, 4, Eigen::Dynamic>>;

  StateBlock states(const Eigen::VectorXd& z, int seg) const {
    return StateBlock(z.data() + layout.state_offset(seg, 0), 13,
                      layout.points_in_segment(seg));
  }
  ControlBlock controls(const Eigen::VectorXd& z, int seg) const {
    return ControlBlock(z.data() + layout.control_offset(seg, 0), 4,
                        layout.points_in_segment(seg));
  }
  double segment_span_factor(const Eigen::VectorXd& z, int seg) const {
    // Duration fractions are fixed shares of (tf - t0).
    return 0.5 * fractions[seg] * (z[1] - z[0]);
  }

  double integrand(const Eigen::Ref<const StateVec>& x,
                   const Eigen::Ref<const ControlVec>& u) const;
  void integrand_gradient(const Eigen::Ref<const StateVec>& x,
                          const Eigen::Ref<const ControlVec>& u,
                          StateVec& dx, ControlVec& du) const;

  double objective(const Eigen::VectorXd& z) const;
  void equalities(const Eigen::VectorXd& z, Eigen::VectorXd& out) const;
  void inequalities(const Eigen::VectorXd& z, Eigen::VectorXd& out) const;
  void weighted_gradient(const Eigen::VectorXd& z, double s_obj,
                         const Eigen::VectorXd& w_eq,
                         const Eigen::VectorXd& w_in,
                         Eigen::VectorXd& grad) const;
  void equality_jacobian(const Eigen::VectorXd& z, Eigen::MatrixXd& jac) const;
  void inequality_jacobian(const Eigen::VectorXd& z,
                           Eigen::MatrixXd& jac) const;
  void objective_curvature(const Eigen::VectorXd& z,
                           Eigen::VectorXd& curv) const;
};

double Context::integrand(const Eigen::Ref<const StateVec>& x,
                          const Eigen::Ref<const ControlVec>& u) const {
  double value = 0.0;
  // position, velocity
  for (int c = 0; c < 6; ++c) {
    const double d = x[c] - x_final[c];
    value += weights.q_state[c] * d * d;
  }
  // angular rate
  for (int c = 0; c < 3; ++c) {
    const double d = x[10 + c] - x_final[10 + c];
    value += weights.q_state[6 + c] * d * d;
  }
  const double s = 1.0 - x.segment<4>(6).dot(x_final.segment<4>(6));
  if (weights.smooth_quat_term) {
    const double e = weights.smooth_eps;
    value += weights.q_quat * (std::sqrt(s * s + e * e) - e);
  } else {
    value += weights.q_quat * std::abs(s);
  }
  for (int c = 0; c < 4; ++c) {
    const double d = u[c] - u_final[c];
    value += weights.r_control[c] * d * d;
  }
  return value;
}

void Context::integrand_gradient(const Eigen::Ref<const StateVec>& x,
                                 const Eigen::Ref<const ControlVec>& u,
                                 StateVec& dx, ControlVec& du) const {
  dx.setZero();
  du.setZero();
  for (int c = 0; c < 6; ++c) {
    dx[c] = 2.0 * weights.q_state[c] * (x[c] - x_final[c]);
  }
  for (int c = 0; c < 3; ++c) {
    dx[10 + c] = 2.0 * weights.q_state[6 + c] * (x[10 + c] - x_final[10 + c]);
  }
  const double s = 1.0 - x.segment<4>(6).dot(x_final.segment<4>(6));
  double dquat;
  if (weights.smooth_quat_term) {
    const double e = weights.smooth_eps;
    dquat = s / std::sqrt(s * s + e * e);
  } else {
    dquat = (s >= 0.0) ? 1.0 : -1.0;
  }
  dx.segment<4>(6) = -weights.q_quat * dquat * x_final.segment<4>(6);
  for (int c = 0; c < 4; ++c) {
    du[c] = 2.0 * weights.r_control[c] * (u[c] - u_final[c]);
  }
}

double Context::objective(const Eigen::VectorXd& z) const {
  double total = 0.0;
  for (int s = 0; s < layout.num_segments(); ++s) {
    const auto X = states(z, s);
    const auto U = controls(z, s);
    const double c = segment_span_factor(z, s);
    const Eigen::VectorXd& w = grids[s].weights;
    for (int k = 0; k < X.cols(); ++k) {
      total += w[k] * c * integrand(X.col(k), U.col(k));
    }
  }
  return total;
}

void Context::equalities(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
  out.resize(num_equalities);
  const int segs = layout.num_segments();
  std::vector<Eigen::Matrix<double, 13, Eigen::Dynamic>> deriv(segs);

  for (int s = 0; s < segs; ++s) {
    const auto X = states(z, s);
    const auto U = controls(z, s);
    deriv[s] = X * grids[s].diff_matrix.transpose();
    const double c = segment_span_factor(z, s);
    const int base = 13 * layout.global_point(s, 0);
    StateVec f;
    for (int k = 0; k < X.cols(); ++k) {
      f = state_derivative_raw(X.col(k), U.col(k), params);
      out.segment<13>(base + 13 * k) =
          row_scale.cwiseProduct(deriv[s].col(k) - c * f);
    }
  }

  for (int s = 0; s < segs; ++s) {
    const auto X = states(z, s);
    for (int k = 0; k < X.cols(); ++k) {
      const Eigen::Vector4d q = X.col(k).segment<4>(6);
      out[eq_quat_offset + layout.global_point(s, k)] = q.squaredNorm() - 1.0;
    }
  }

  out.segment<13>(eq_boundary_offset) = states(z, 0).col(0) - x_initial;
  const auto X_last = states(z, segs - 1);
  out.segment<13>(eq_boundary_offset + 13) =
      X_last.col(X_last.cols() - 1) - x_final;

  for (int s = 0; s + 1 < segs; ++s) {
    const int base = eq_continuity_offset + 30 * s;
    const auto Xa = states(z, s);
    const auto Xb = states(z, s + 1);
    const auto Ua = controls(z, s);
    const auto Ub = controls(z, s + 1);
    const int last = Xa.cols() - 1;
    out.segment<13>(base) = Xa.col(last) - Xb.col(0);
    out.segment<13>(base + 13) = row_scale.cwiseProduct(
        deriv[s].col(last) / fractions[s] -
        deriv[s + 1].col(0) / fractions[s + 1]);
    out.segment<4>(base + 26) = Ua.col(last) - Ub.col(0);
  }
}

void Context::inequalities(const Eigen::VectorXd& z,
                           Eigen::VectorXd& out) const {
  out.resize(num_inequalities);
  if (num_inequalities == 0) return;
  const int ncols = static_cast<int>(column_centers.size());
  for (int s = 0; s < layout.num_segments(); ++s) {
    const auto X = states(z, s);
    for (int k = 0; k < X.cols(); ++k) {
      const int p = layout.global_point(s, k);
      const double x = X(0, k);
      const double y = X(1, k);
      for (int j = 0; j < ncols; ++j) {
        const double dx = x - column_centers[j].x();
        const double dy = y - column_centers[j].y();
        out[p * ncols + j] = inflated_radius_sq[j] - dx * dx - dy * dy;
      }
    }
  }
}

void Context::weighted_gradient(const Eigen::VectorXd& z, double s_obj,
                                const Eigen::VectorXd& w_eq,
                                const Eigen::VectorXd& w_in,
                                Eigen::VectorXd& grad) const {
  grad.setZero(layout.dimension());
  const int segs = layout.num_segments();

  StateVec dx;
  ControlVec du;
  StateVec f;
  DynamicsJacobian jac;

  for (int s = 0; s < segs; ++s) {
    const auto X = states(z, s);
    const auto U = controls(z, s);
    const int npts = static_cast<int>(X.cols());
    const double c = segment_span_factor(z, s);
    const double half_frac = 0.5 * fractions[s];
    const Eigen::VectorXd& w = grids[s].weights;

    // Defect weights for this segment as a 13 x npts block.
    Eigen::Map<const Eigen::Matrix<double, 13, Eigen::Dynamic>> W(
        w_eq.data() + 13 * layout.global_point(s, 0), 13, npts);
    Eigen::Matrix<double, 13, Eigen::Dynamic> Wscaled =
        row_scale.asDiagonal() * W;
    // Linear part: interpolant-derivative term.
    const Eigen::Matrix<double, 13, Eigen::Dynamic> GX =
        Wscaled * grids[s].diff_matrix;

    for (int k = 0; k < npts; ++k) {
      auto gx = grad.segment<13>(layout.state_offset(s, k));
      auto gu = grad.segment<4>(layout.control_offset(s, k));
      gx += GX.col(k);

      state_derivative_jacobian(X.col(k), U.col(k), params, f, jac);
      const Eigen::Matrix<double, 17, 1> jt =
          jac.transpose() * Wscaled.col(k);
      gx -= c * jt.segment<13>(0);
      gu -= c * jt.segment<4>(13);
      const double fw = f.dot(Wscaled.col(k));
      grad[1] -= half_frac * fw;
      grad[0] += half_frac * fw;

      if (s_obj != 0.0) {
        integrand_gradient(X.col(k), U.col(k), dx, du);
        const double wk = s_obj * w[k];
        gx += wk * c * dx;
        gu += wk * c * du;
        const double lk = integrand(X.col(k), U.col(k));
        grad[1] += wk * half_frac * lk;
        grad[0] -= wk * half_frac * lk;
      }
    }
  }

  for (int s = 0; s < segs; ++s) {
    const auto X = states(z, s);
    for (int k = 0; k < X.cols(); ++k) {
      const double wq = w_eq[eq_quat_offset + layout.global_point(s, k)];
      grad.segment<4>(layout.state_offset(s, k) + 6) +=
          2.0 * wq * X.col(k).segment<4>(6);
    }
  }

  grad.segment<13>(layout.state_offset(0, 0)) +=
      w_eq.segment<13>(eq_boundary_offset);
  const int last_seg = segs - 1;
  const int last_pt = layout.points_in_segment(last_seg) - 1;
  grad.segment<13>(layout.state_offset(last_seg, last_pt)) +=
      w_eq.segment<13>(eq_boundary_offset + 13);

  for (int s = 0; s + 1 < segs; ++s) {
    const int base = eq_continuity_offset + 30 * s;
    const int na = layout.points_in_segment(s);
    const auto ws = w_eq.segment<13>(base);
    grad.segment<13>(layout.state_offset(s, na - 1)) += ws;
    grad.segment<13>(layout.state_offset(s + 1, 0)) -= ws;

    const Eigen::Matrix<double, 13, 1> wd =
        row_scale.cwiseProduct(w_eq.segment<13>(base + 13));
    const Eigen::MatrixXd& Da = grids[s].diff_matrix;
    const Eigen::MatrixXd& Db = grids[s + 1].diff_matrix;
    for (int j = 0; j < na; ++j) {
      grad.segment<13>(layout.state_offset(s, j)) +=
          (Da(na - 1, j) / fractions[s]) * wd;
    }
    const int nb = layout.points_in_segment(s + 1);
    for (int j = 0; j < nb; ++j) {
      grad.segment<13>(layout.state_offset(s + 1, j)) -=
          (Db(0, j) / fractions[s + 1]) * wd;
    }

    const auto wc = w_eq.segment<4>(base + 26);
    grad.segment<4>(layout.control_offset(s, na - 1)) += wc;
    grad.segment<4>(layout.control_offset(s + 1, 0)) -= wc;
  }

  if (num_inequalities > 0) {
    const int ncols = static_cast<int>(column_centers.size());
    for (int s = 0; s < segs; ++s) {
      const auto X = states(z, s);
      for (int k = 0; k < X.cols(); ++k) {
        const int p = layout.global_point(s, k);
        const int off = layout.state_offset(s, k);
        for (int j = 0; j < ncols; ++j) {
          const double wi = w_in[p * ncols + j];
          if (wi == 0.0) continue;
          grad[off + 0] -= 2.0 * wi * (X(0, k) - column_centers[j].x());
          grad[off + 1] -= 2.0 * wi * (X(1, k) - column_centers[j].y());
        }
      }
    }
  }
}

void Context::equality_jacobian(const Eigen::VectorXd& z,
                                Eigen::MatrixXd& jac) const {
  const int n = layout.dimension();
  jac.setZero(num_equalities, n);
  const int segs = layout.num_segments();

  StateVec f;
  DynamicsJacobian dyn_jac;
  for (int s = 0; s < segs; ++s) {
    const auto X = states(z, s);
    const auto U = controls(z, s);
    const int npts = static_cast<int>(X.cols());
    const double c = segment_span_factor(z, s);
    const double half_frac = 0.5 * fractions[s];
    const Eigen::MatrixXd& D = grids[s].diff_matrix;
    const int base = 13 * layout.global_point(s, 0);

    for (int k = 0; k < npts; ++k) {
      state_derivative_jacobian(X.col(k), U.col(k), params, f, dyn_jac);
      for (int ch = 0; ch < 13; ++ch) {
        const int row = base + 13 * k + ch;
        const double rs = row_scale[ch];
        for (int j = 0; j < npts; ++j) {
          jac(row, layout.state_offset(s, j) + ch) += rs * D(k, j);
        }
        const int xoff = layout.state_offset(s, k);
        const int uoff = layout.control_offset(s, k);
        for (int cc = 0; cc < 13; ++cc) {
          jac(row, xoff + cc) -= rs * c * dyn_jac(ch, cc);
        }
        for (int cc = 0; cc < 4; ++cc) {
          jac(row, uoff + cc) -= rs * c * dyn_jac(ch, 13 + cc);
        }
        jac(row, 1) -= rs * half_frac * f[ch];
        jac(row, 0) += rs * half_frac * f[ch];
      }
    }
  }

  for (int s = 0; s < segs; ++s) {
    const auto X = states(z, s);
    for (int k = 0; k < X.cols(); ++k) {
      const int row = eq_quat_offset + layout.global_point(s, k);
      const int off = layout.state_offset(s, k) + 6;
      for (int c = 0; c < 4; ++c) {
        jac(row, off + c) = 2.0 * X(6 + c, k);
      }
    }
  }

  for (int c = 0; c < 13; ++c) {
    jac(eq_boundary_offset + c, layout.state_offset(0, 0) + c) = 1.0;
  }
  const int last_seg = segs - 1;
  const int last_pt = layout.points_in_segment(last_seg) - 1;
  for (int c = 0; c < 13; ++c) {
    jac(eq_boundary_offset + 13 + c,
        layout.state_offset(last_seg, last_pt) + c) = 1.0;
  }

  for (int s = 0; s + 1 < segs; ++s) {
    const int base = eq_continuity_offset + 30 * s;
    const int na = layout.points_in_segment(s);
    const int nb = layout.points_in_segment(s + 1);
    for (int c = 0; c < 13; ++c) {
      jac(base + c, layout.state_offset(s, na - 1) + c) = 1.0;
      jac(base + c, layout.state_offset(s + 1, 0) + c) = -1.0;
    }
    const Eigen::MatrixXd& Da = grids[s].diff_matrix;
    const Eigen::MatrixXd& Db = grids[s + 1].diff_matrix;
    for (int c = 0; c < 13; ++c) {
      const int row = base + 13 + c;
      const double rs = row_scale[c];
      for (int j = 0; j < na; ++j) {
        jac(row, layout.state_offset(s, j) + c) +=
            rs * Da(na - 1, j) / fractions[s];
      }
      for (int j = 0; j < nb; ++j) {
        jac(row, layout.state_offset(s + 1, j) + c) -=
            rs * Db(0, j) / fractions[s + 1];
      }
    }
    for (int c = 0; c < 4; ++c) {
      jac(base + 26 + c, layout.control_offset(s, na - 1) + c) = 1.0;
      jac(base + 26 + c, layout.control_offset(s + 1, 0) + c) = -1.0;
    }
  }
}

void Context::inequality_jacobian(const Eigen::VectorXd& z,
                                  Eigen::MatrixXd& jac) const {
  jac.setZero(num_inequalities, layout.dimension());
  if (num_inequalities == 0) return;
  const int ncols = static_cast<int>(column_centers.size());
  for (int s = 0; s < layout.num_segments(); ++s) {
    const auto X = states(z, s);
    for (int k = 0; k < X.cols(); ++k) {
      const int p = layout.global_point(s, k);
      const int off = layout.state_offset(s, k);
      for (int j = 0; j < ncols; ++j) {
        jac(p * ncols + j, off + 0) =
            -2.0 * (X(0, k) - column_centers[j].x());
        jac(p * ncols + j, off + 1) =
            -2.0 * (X(1, k) - column_centers[j].y());
      }
    }
  }
}

void Context::objective_curvature(const Eigen::VectorXd& z,
                                  Eigen::VectorXd& curv) const {
  curv.setZero(layout.dimension());
  for (int s = 0; s < layout.num_segments(); ++s) {
    const auto X = states(z, s);
    const double c = std::max(segment_span_factor(z, s), 0.0);
    const Eigen::VectorXd& w = grids[s].weights;
    for (int k = 0; k < layout.points_in_segment(s); ++k) {
      const double wk = w[k] * c;
      const int xoff = layout.state_offset(s, k);
      const int uoff = layout.control_offset(s, k);
      for (int ch = 0; ch < 6; ++ch) {
        curv[xoff + ch] += 2.0 * wk * weights.q_state[ch];
      }
      for (int ch = 0; ch < 3; ++ch) {
        curv[xoff + 10 + ch] += 2.0 * wk * weights.q_state[6 + ch];
      }
      if (weights.smooth_quat_term) {
        // Curvature of sqrt(s^2 + eps^2) along the target direction.
        const double sdev =
            1.0 - X.col(k).segment<4>(6).dot(x_final.segment<4>(6));
        const double e = weights.smooth_eps;
        const double denom = std::pow(sdev * sdev + e * e, 1.5);
        const double dd = weights.q_quat * wk * e * e / denom;
        for (int ch = 0; ch < 4; ++ch) {
          const double qf = x_final[6 + ch];
          curv[xoff + 6 + ch] += dd * qf * qf;
        }
      }
      for (int ch = 0; ch < 4; ++ch) {
        curv[uoff + ch] += 2.0 * wk * weights.r_control[ch];
      }
    }
  }
}

}  // namespace

double criterion_integrand(const UavState& x, const UavControl& u,
                           const UavState& x_final, const UavControl& u_final,
                           const Weights& weights) {
  Context ctx;
  ctx.weights = weights;
  ctx.x_final = pack_state(x_final);
  ctx.u_final = pack_control(u_final);
  const StateVec xv = pack_state(x);
  const ControlVec uv = pack_control(u);
  return ctx.integrand(xv, uv);
}

NlpProblem build_nlp(const Scenario& scenario, const UavParams& params,
                     const Mesh& mesh, const Weights& weights) {
  mesh.validate();
  if (weights.q_state.minCoeff() < 0.0 || weights.q_quat < 0.0 ||
      weights.r_control.minCoeff() <= 0.0) {
    throw std::invalid_argument("build_nlp: weights must be (semi)definite");
  }
  if ((scenario.workspace.upper - scenario.workspace.lower).minCoeff() <=
      0.0) {
    throw std::invalid_argument("build_nlp: degenerate workspace");
  }
  if ((scenario.goal - scenario.start).norm() == 0.0) {
    throw std::invalid_argument("build_nlp: start equals goal");
  }

  auto ctx = std::make_shared<Context>();
  ctx->mesh = mesh;
  ctx->layout = DecisionLayout(mesh);
  ctx->params = params;
  ctx->weights = weights;
  for (const MeshSegment& s : mesh.segments) {
    ctx->grids.push_back(cheb::make_grid(s.degree));
    ctx->fractions.push_back(s.duration_fraction);
  }
  const BoundaryConditions bc =
      BoundaryConditions::hover_to_hover(scenario, params);
  ctx->x_initial = pack_state(bc.initial_state);
  ctx->x_final = pack_state(bc.final_state);
  ctx->u_initial = pack_control(bc.initial_control);
  ctx->u_final = pack_control(bc.final_control);

  const double r_safe = env::safety_radius(params);
  for (const Column& col : scenario.columns) {
    ctx->column_centers.push_back(col.center);
    const double r = col.radius + r_safe;
    ctx->inflated_radius_sq.push_back(r * r);
  }

  const int P = ctx->layout.total_points();
  const int S = ctx->layout.num_segments();
  ctx->num_points = P;
  ctx->eq_quat_offset = 13 * P;
  ctx->eq_boundary_offset = 13 * P + P;
  ctx->eq_continuity_offset = ctx->eq_boundary_offset + 26;
  ctx->num_equalities = ctx->eq_continuity_offset + 30 * (S - 1);
  ctx->num_inequalities = P * static_cast<int>(scenario.columns.size());

  NlpProblem problem;
  problem.layout = ctx->layout;
  problem.dimension = ctx->layout.dimension();
  problem.num_equalities = ctx->num_equalities;
  problem.num_inequalities = ctx->num_inequalities;

  const BoxLimits limits = BoxLimits::for_scenario(scenario);
  problem.lower.resize(problem.dimension);
  problem.upper.resize(problem.dimension);
  problem.variable_scales.setOnes(problem.dimension);
  problem.lower[0] = 0.0;  // t0 fixed by equal bounds
  problem.upper[0] = 0.0;
  problem.lower[1] = 0.0;
  problem.upper[1] = params.max_flight_time;
  problem.variable_scales[1] = 2.0;

  StateVec state_scale;
  state_scale << 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 5, 5, 5;
  ControlVec control_scale;
  control_scale << 0.5, limits.torque_abs[0], limits.torque_abs[1],
      limits.torque_abs[2];
  for (int s = 0; s < S; ++s) {
    for (int k = 0; k < ctx->layout.points_in_segment(s); ++k) {
      problem.lower.segment<13>(ctx->layout.state_offset(s, k)) =
          limits.state_lower();
      problem.upper.segment<13>(ctx->layout.state_offset(s, k)) =
          limits.state_upper();
      problem.lower.segment<4>(ctx->layout.control_offset(s, k)) =
          limits.control_lower();
      problem.upper.segment<4>(ctx->layout.control_offset(s, k)) =
          limits.control_upper();
      problem.variable_scales.segment<13>(ctx->layout.state_offset(s, k)) =
          state_scale;
      problem.variable_scales.segment<4>(ctx->layout.control_offset(s, k)) =
          control_scale;
    }
  }
  // Boundary controls are pinned by bounds, matching the stabilized
  // boundary conditions exactly.
  problem.lower.segment<4>(ctx->layout.control_offset(0, 0)) = ctx->u_initial;
  problem.upper.segment<4>(ctx->layout.control_offset(0, 0)) = ctx->u_initial;
  const int lp = ctx->layout.points_in_segment(S - 1) - 1;
  problem.lower.segment<4>(ctx->layout.control_offset(S - 1, lp)) =
      ctx->u_final;
  problem.upper.segment<4>(ctx->layout.control_offset(S - 1, lp)) =
      ctx->u_final;

  problem.objective = [ctx](const Eigen::VectorXd& z) {
    return ctx->objective(z);
  };
  problem.equality_constraints = [ctx](const Eigen::VectorXd& z,
                                       Eigen::VectorXd& out) {
    ctx->equalities(z, out);
  };
  problem.inequality_constraints = [ctx](const Eigen::VectorXd& z,
                                         Eigen::VectorXd& out) {
    ctx->inequalities(z, out);
  };
  problem.weighted_gradient =
      [ctx](const Eigen::VectorXd& z, double s_obj, const Eigen::VectorXd& we,
            const Eigen::VectorXd& wi, Eigen::VectorXd& grad) {
        ctx->weighted_gradient(z, s_obj, we, wi, grad);
      };
  problem.equality_jacobian = [ctx](const Eigen::VectorXd& z,
                                    Eigen::MatrixXd& jac) {
    ctx->equality_jacobian(z, jac);
  };
  problem.inequality_jacobian = [ctx](const Eigen::VectorXd& z,
                                      Eigen::MatrixXd& jac) {
    ctx->inequality_jacobian(z, jac);
  };
  problem.objective_curvature = [ctx](const Eigen::VectorXd& z,
                                      Eigen::VectorXd& curv) {
    ctx->objective_curvature(z, curv);
  };
  return problem;
}

Trajectory extract_trajectory(const Eigen::VectorXd& solution, const Mesh& mesh,
                              const DecisionLayout& layout) {
  if (solution.size() != layout.dimension()) {
    throw std::invalid_argument("extract_trajectory: dimension mismatch");
  }
  mesh.validate();
  Trajectory traj;
  traj.t0 = solution[0];
  traj.tf = solution[1];
  if (!(traj.tf > traj.t0)) {
    throw std::invalid_argument("extract_trajectory: tf must exceed t0");
  }
  const std::vector<double> b = mesh.boundaries();
  const double span = traj.tf - traj.t0;
  for (int s = 0; s < layout.num_segments(); ++s) {
    Trajectory::Segment seg;
    const double seg_t0 = traj.t0 + b[s] * span;
    const double seg_tf = (s + 1 == layout.num_segments())
                              ? traj.tf
                              : traj.t0 + b[s + 1] * span;
    seg.grid = cheb::scale_grid(cheb::make_grid(mesh.segments[s].degree),
                                seg_t0, seg_tf);
    const int npts = layout.points_in_segment(s);
    seg.states = Eigen::Map<const Eigen::Matrix<double, 13, Eigen::Dynamic>>(
        solution.data() + layout.state_offset(s, 0), 13, npts);
    seg.controls = Eigen::Map<const Eigen::Matrix<double, 4, Eigen::Dynamic>>(
        solution.data() + layout.control_offset(s, 0), 4, npts);
    seg.state_derivs = seg.states * seg.grid.scaled_diff.transpose();
    traj.segments.push_back(std::move(seg));
  }
  return traj;
}

Eigen::VectorXd to_decision_vector(const InitialGuess& guess,
                                   const DecisionLayout& layout) {
  if (static_cast<int>(guess.states.size()) != layout.total_points() ||
      guess.controls.size() != guess.states.size()) {
    throw std::invalid_argument("to_decision_vector: point count mismatch");
  }
  Eigen::VectorXd z(layout.dimension());
  z[0] = guess.t0;
  z[1] = guess.tf;
  int p = 0;
  for (int s = 0; s < layout.num_segments(); ++s) {
    for (int k = 0; k < layout.points_in_segment(s); ++k, ++p) {
      z.segment<13>(layout.state_offset(s, k)) = pack_state(guess.states[p]);
      z.segment<4>(layout.control_offset(s, k)) =
          pack_control(guess.controls[p]);
    }
  }
  return z;
}

}  // namespace uavtraj::nlp
