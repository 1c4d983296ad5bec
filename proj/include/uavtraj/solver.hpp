#pragma once

#include <Eigen/Core>

#include "uavtraj/transcribe.hpp"

namespace uavtraj::solver {

enum class SolveStatus {
  kConverged,
  kIterationLimit,
  kTimeLimit,
  kInfeasible,
  kNumericalFailure,
};

const char* to_string(SolveStatus status);

struct SolveOptions {
  int max_iterations = 3000;  // total inner-iteration budget
  double constraint_tolerance = 1e-6;
  double optimality_tolerance = 1e-6;
  double wall_clock_budget = 300.0;  // seconds
  bool verbose = false;
};

struct SolveResult {
  Eigen::VectorXd point;
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective = 0.0;
  double max_constraint_violation = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
};

/// Reference NLP solver: augmented Lagrangian (PHR handling of the
/// inequalities) around a bound-constrained limited-memory quasi-Newton
/// inner minimization with projected line searches. The guess is clipped
/// into the bounds before the first iteration; the reported objective and
/// violation are recomputed from the returned point.
SolveResult solve(const nlp::NlpProblem& problem, const Eigen::VectorXd& guess,
                  const SolveOptions& options);

}  // namespace uavtraj::solver
