#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>

#include "uavtraj/dynamics.hpp"
#include "uavtraj/environment.hpp"
#include "uavtraj/guess.hpp"
#include "uavtraj/limits.hpp"
#include "uavtraj/mesh.hpp"
#include "uavtraj/trajectory.hpp"

namespace uavtraj::nlp {

/// Criterion weights: quadratic on the quaternion-free state deviation and
/// the control deviation, plus the scalar quaternion-distance weight.
struct Weights {
  Eigen::Matrix<double, 9, 1> q_state;  // position, velocity, angular rate
  double q_quat = 100.0;
  Eigen::Vector4d r_control;
  // |1 - q.qf| is nonsmooth at the target; the smoothed variant
  // sqrt((1-q.qf)^2 + eps^2) - eps is selectable for solvers that need it.
  bool smooth_quat_term = false;
  double smooth_eps = 1e-8;

  static Weights defaults();
};

/// Bijection between decision indices and named quantities.
/// Vector layout: [t0, tf, states (segment-major, 13 per point),
/// controls (segment-major, 4 per point)].
class DecisionLayout {
 public:
  DecisionLayout() = default;
  explicit DecisionLayout(const Mesh& mesh);

  int dimension() const { return dimension_; }
  int total_points() const { return total_points_; }
  int num_segments() const { return static_cast<int>(points_per_segment_.size()); }
  int points_in_segment(int seg) const { return points_per_segment_[seg]; }

  int t0_index() const { return 0; }
  int tf_index() const { return 1; }
  int state_offset(int seg, int point) const {
    return 2 + 13 * (segment_start_[seg] + point);
  }
  int control_offset(int seg, int point) const {
    return 2 + 13 * total_points_ + 4 * (segment_start_[seg] + point);
  }
  int global_point(int seg, int point) const {
    return segment_start_[seg] + point;
  }

  struct Location {
    enum class Kind { kT0, kTf, kState, kControl };
    Kind kind = Kind::kT0;
    int segment = -1;
    int point = -1;
    int channel = -1;
  };
  Location locate(int index) const;
  int index_of(const Location& loc) const;
  std::string describe(int index) const;

 private:
  std::vector<int> points_per_segment_;
  std::vector<int> segment_start_;
  int total_points_ = 0;
  int dimension_ = 0;
};

/// The transcribed program. Feasible means h(z) = 0, g(z) <= 0,
/// lower <= z <= upper. All callbacks are pure and reentrant.
struct NlpProblem {
  int dimension = 0;
  int num_equalities = 0;
  int num_inequalities = 0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  // Magnitude hints per variable; solvers may precondition with them.
  Eigen::VectorXd variable_scales;

  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>
      equality_constraints;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>
      inequality_constraints;
  /// grad = s_obj * grad f + J_eq^T w_eq + J_ineq^T w_ineq.
  std::function<void(const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                     const Eigen::VectorXd&, Eigen::VectorXd&)>
      weighted_gradient;
  /// Dense constraint Jacobians (rows = constraints). Optional; solvers
  /// with second-order inner steps use them when present.
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>
      equality_jacobian;
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>
      inequality_jacobian;
  /// Diagonal curvature of the objective (Gauss-Newton style, >= 0).
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>
      objective_curvature;

  DecisionLayout layout;
};

double criterion_integrand(const UavState& x, const UavControl& u,
                           const UavState& x_final, const UavControl& u_final,
                           const Weights& weights);

/// Assemble objective, defects, quaternion-norm and boundary equalities,
/// inter-segment continuity, obstacle inequalities, and variable bounds.
NlpProblem build_nlp(const Scenario& scenario, const UavParams& params,
                     const Mesh& mesh, const Weights& weights);

/// Per-segment interpolating polynomials from a solved decision vector.
Trajectory extract_trajectory(const Eigen::VectorXd& solution, const Mesh& mesh,
                              const DecisionLayout& layout);

Eigen::VectorXd to_decision_vector(const InitialGuess& guess,
                                   const DecisionLayout& layout);

}  // namespace uavtraj::nlp
