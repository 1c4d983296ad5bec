#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uavtraj/guess.hpp"
#include "uavtraj/solver.hpp"
#include "uavtraj/trajectory.hpp"
#include "uavtraj/transcribe.hpp"

namespace uavtraj::refine {

enum class Method { kPsm, kPsem };
const char* to_string(Method method);
std::optional<Method> method_from_string(std::string_view name);

enum class PlanStatus { kConverged, kIterationLimit, kTimeLimit, kFailed };
const char* to_string(PlanStatus status);

/// Discretization-error summary over the interpoint intervals of a mesh.
/// Channel-wise errors are reduced by the maximum over the 13 state
/// channels.
struct ErrorReport {
  double t0 = 0.0;
  double tf = 0.0;
  std::vector<double> interval_start;
  std::vector<double> interval_end;
  std::vector<int> interval_segment;
  std::vector<double> abs_errors;  // eps_a per interval, channel-maxed
  std::vector<double> rel_errors;  // eps_r per interval, channel-maxed
  double abs_max = 0.0;
  double rel_max = 0.0;
  std::vector<double> segment_abs_max;
  std::vector<double> segment_rel_max;
  Eigen::Matrix<double, 13, Eigen::Dynamic> abs_by_channel;
  bool has_relative = false;
};

struct RefineOptions {
  double abs_tolerance = 1e-2;        // stop threshold on eps_a_max
  double rel_split_tolerance = 1e-1;  // PSEM split threshold on eps_r_max
  int max_iterations = 10;
  double wall_clock_budget = 900.0;  // seconds, whole planning loop
  double min_segment_duration = 0.05;
  int psm_initial_degree = 30;
  int psem_min_degree = 10;
  int psem_default_segments = 4;
  // Path-seeded meshes merge their shortest legs down to this many
  // segments; relative-error splitting re-adds segments where they earn
  // their solve cost.
  int psem_max_initial_segments = 4;
  // Per-solve budgets sized for the desk-scale NLPs this driver builds.
  // The iteration budget binds so identical runs stay byte-identical; the
  // wall clock is a slack safety net.
  solver::SolveOptions solver{.max_iterations = 6000,
                              .wall_clock_budget = 600.0};
};

struct PlanResult {
  PlanStatus status = PlanStatus::kFailed;
  GuessLevel level = GuessLevel::kSimple;
  bool constrained = false;
  Method method = Method::kPsm;
  Trajectory trajectory;
  std::vector<Mesh> mesh_history;
  int iterations = 0;
  ErrorReport final_report;
  std::vector<solver::SolveResult> solves;
  double total_wall_time = 0.0;
  GridPath seed_path;  // empty when the guess level needs no path
  std::string failure_reason;
};

/// Composite Simpson quadrature with the given (even) subinterval count.
double composite_simpson(const std::function<double(double)>& fn, double a,
                         double b, int subintervals);

/// eps_d(t): interpolant derivative minus the dynamics along the trajectory.
StateVec discretization_error(const Trajectory& traj, const UavParams& params,
                              double t);

/// eps_a per interpoint interval by composite Simpson with 10 subintervals.
ErrorReport absolute_errors(const Trajectory& traj, const Mesh& mesh,
                            const UavParams& params);

/// eps_r = eps_a / max(delta, |interval mean of the state|), channel-wise
/// with delta = 1e-6, reduced by max.
void relative_errors(ErrorReport& report, const Trajectory& traj);

/// Raise the single segment's degree by max(ceil(log_N(eps_a_max/tol)), 3).
/// Throws if the report is already within tolerance.
Mesh psm_refine(const Mesh& mesh, const ErrorReport& report, double tolerance);

/// Split segments whose relative error exceeds the split tolerance at the
/// interval edge with the largest consecutive eps_r increase; raise degrees
/// elsewhere. Splits that would create a segment shorter than
/// min_segment_duration degrade to a degree increase.
Mesh psem_refine(const Mesh& mesh, const ErrorReport& report,
                 double abs_tolerance, double split_tolerance,
                 double min_segment_duration);

/// Old trajectory evaluated at the new collocation points, quaternions
/// renormalized and samples clamped into the boxes.
Eigen::VectorXd propagate_solution(const Trajectory& traj, const Mesh& new_mesh,
                                   const BoxLimits& limits);

/// Iterative plan-solve-estimate-refine loop.
PlanResult plan(const Scenario& scenario, const UavParams& params,
                Method method, GuessLevel level, bool constrained,
                const RefineOptions& options, const nlp::Weights& weights);

}  // namespace uavtraj::refine
