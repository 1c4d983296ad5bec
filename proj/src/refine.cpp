#include "uavtraj/refine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uavtraj/lazy_theta_star.hpp"

namespace uavtraj::refine {

const char* to_string(Method method) {
  return method == Method::kPsm ? "psm" : "psem";
}

std::optional<Method> method_from_string(std::string_view name) {
  if (name == "psm") return Method::kPsm;
  if (name == "psem") return Method::kPsem;
  return std::nullopt;
}

const char* to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::kConverged: return "converged";
    case PlanStatus::kIterationLimit: return "iteration_limit";
    case PlanStatus::kTimeLimit: return "time_limit";
    case PlanStatus::kFailed: return "failed";
  }
  return "unknown";
}

double composite_simpson(const std::function<double(double)>& fn, double a,
                         double b, int subintervals) {
  if (subintervals < 2 || subintervals % 2 != 0) {
    throw std::invalid_argument("composite_simpson needs an even count");
  }
  const double h = (b - a) / subintervals;
  double total = fn(a) + fn(b);
  for (int j = 1; j < subintervals; ++j) {
    total += fn(a + j * h) * (j % 2 == 1 ? 4.0 : 2.0);
  }
  return total * h / 3.0;
}

StateVec discretization_error(const Trajectory& traj, const UavParams& params,
                              double t) {
  const StateVec x = traj.state(t);
  const ControlVec u = traj.control(t);
  return traj.state_polynomial_derivative(t) -
         state_derivative_raw(x, u, params);
}

namespace {
constexpr int kSimpsonSubintervals = 10;
constexpr double kRelativeGuard = 1e-6;
}  // namespace

ErrorReport absolute_errors(const Trajectory& traj, const Mesh& mesh,
                            const UavParams& params) {
  mesh.validate();
  if (mesh.segments.size() != traj.segments.size()) {
    throw std::invalid_argument("absolute_errors: mesh does not match");
  }
  ErrorReport report;
  report.t0 = traj.t0;
  report.tf = traj.tf;
  int total_intervals = 0;
  for (const auto& seg : traj.segments) {
    total_intervals += static_cast<int>(seg.grid.times.size()) - 1;
  }
  report.abs_by_channel.resize(13, total_intervals);
  report.segment_abs_max.assign(traj.segments.size(), 0.0);

  int interval = 0;
  for (std::size_t s = 0; s < traj.segments.size(); ++s) {
    const auto& times = traj.segments[s].grid.times;
    for (int k = 0; k + 1 < times.size(); ++k, ++interval) {
      const double a = times[k];
      const double b = times[k + 1];
      report.interval_start.push_back(a);
      report.interval_end.push_back(b);
      report.interval_segment.push_back(static_cast<int>(s));

      const double h = (b - a) / kSimpsonSubintervals;
      Eigen::Matrix<double, 13, 1> acc = Eigen::Matrix<double, 13, 1>::Zero();
      for (int j = 0; j <= kSimpsonSubintervals; ++j) {
        const double t = (j == kSimpsonSubintervals) ? b : a + j * h;
        double w = (j == 0 || j == kSimpsonSubintervals)
                       ? 1.0
                       : (j % 2 == 1 ? 4.0 : 2.0);
        acc += w * discretization_error(traj, params, t).cwiseAbs();
      }
      const Eigen::Matrix<double, 13, 1> eps_a = acc * h / 3.0;
      report.abs_by_channel.col(interval) = eps_a;
      const double reduced = eps_a.maxCoeff();
      report.abs_errors.push_back(reduced);
      report.abs_max = std::max(report.abs_max, reduced);
      report.segment_abs_max[s] = std::max(report.segment_abs_max[s], reduced);
    }
  }
  return report;
}

void relative_errors(ErrorReport& report, const Trajectory& traj) {
  const int n = static_cast<int>(report.abs_errors.size());
  report.rel_errors.assign(n, 0.0);
  report.segment_rel_max.assign(report.segment_abs_max.size(), 0.0);
  report.rel_max = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = report.interval_start[i];
    const double b = report.interval_end[i];
    const double h = (b - a) / kSimpsonSubintervals;
    Eigen::Matrix<double, 13, 1> mean = Eigen::Matrix<double, 13, 1>::Zero();
    for (int j = 0; j <= kSimpsonSubintervals; ++j) {
      const double t = (j == kSimpsonSubintervals) ? b : a + j * h;
      mean += traj.state(t);
    }
    mean /= kSimpsonSubintervals + 1;
    double reduced = 0.0;
    for (int c = 0; c < 13; ++c) {
      const double denom = std::max(kRelativeGuard, std::abs(mean[c]));
      reduced = std::max(reduced, report.abs_by_channel(c, i) / denom);
    }
    report.rel_errors[i] = reduced;
    report.rel_max = std::max(report.rel_max, reduced);
    const int s = report.interval_segment[i];
    report.segment_rel_max[s] = std::max(report.segment_rel_max[s], reduced);
  }
  report.has_relative = true;
}

namespace {

int degree_increase(int degree, double abs_max, double tolerance) {
  const double ratio = abs_max / tolerance;
  // Base-N logarithm of the error ratio; the small shift keeps exact
  // integer ratios from rounding up through floating-point noise.
  const double raw = std::log(ratio) / std::log(static_cast<double>(degree));
  return static_cast<int>(std::max(std::ceil(raw - 1e-9), 3.0));
}

}  // namespace

Mesh psm_refine(const Mesh& mesh, const ErrorReport& report,
                double tolerance) {
  mesh.validate();
  if (mesh.segments.size() != 1) {
    throw std::invalid_argument("psm_refine expects a single-segment mesh");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("psm_refine: tolerance must be positive");
  }
  if (report.abs_max <= tolerance) {
    throw std::invalid_argument("psm_refine: already within tolerance");
  }
  Mesh out = mesh;
  const int deg = mesh.segments[0].degree;
  out.segments[0].degree =
      std::min(deg + degree_increase(deg, report.abs_max, tolerance),
               cheb::kMaxDegree);
  return out;
}

Mesh psem_refine(const Mesh& mesh, const ErrorReport& report,
                 double abs_tolerance, double split_tolerance,
                 double min_segment_duration) {
  mesh.validate();
  if (!report.has_relative) {
    throw std::invalid_argument("psem_refine needs relative errors");
  }
  const double span = report.tf - report.t0;
  Mesh out;
  for (std::size_t s = 0; s < mesh.segments.size(); ++s) {
    const MeshSegment seg = mesh.segments[s];
    if (report.segment_abs_max[s] <= abs_tolerance) {
      out.segments.push_back(seg);
      continue;
    }

    bool split_done = false;
    if (report.segment_rel_max[s] > split_tolerance) {
      // Largest consecutive increase of eps_r inside this segment.
      int best = -1;
      double best_delta = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i + 1 < report.rel_errors.size(); ++i) {
        if (report.interval_segment[i] != static_cast<int>(s) ||
            report.interval_segment[i + 1] != static_cast<int>(s)) {
          continue;
        }
        const double delta = report.rel_errors[i + 1] - report.rel_errors[i];
        if (delta > best_delta) {
          best_delta = delta;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) {
        const double t_split = report.interval_end[best];
        // Segment time range, recovered from its interval list.
        double seg_start = 0.0, seg_end = 0.0;
        for (std::size_t i = 0; i < report.rel_errors.size(); ++i) {
          if (report.interval_segment[i] == static_cast<int>(s)) {
            seg_start = report.interval_start[i];
            break;
          }
        }
        for (std::size_t i = report.rel_errors.size(); i-- > 0;) {
          if (report.interval_segment[i] == static_cast<int>(s)) {
            seg_end = report.interval_end[i];
            break;
          }
        }
        const double left = t_split - seg_start;
        const double right = seg_end - t_split;
        if (left >= min_segment_duration && right >= min_segment_duration) {
          MeshSegment a = seg, b = seg;
          a.duration_fraction = left / span;
          b.duration_fraction = right / span;
          out.segments.push_back(a);
          out.segments.push_back(b);
          split_done = true;
        }
      }
    }
    if (!split_done) {
      MeshSegment raised = seg;
      raised.degree = std::min(
          seg.degree +
              degree_increase(seg.degree, report.segment_abs_max[s],
                              abs_tolerance),
          cheb::kMaxDegree);
      out.segments.push_back(raised);
    }
  }
  // Remove accumulated rounding so the fractions still sum to one.
  double sum = 0.0;
  for (const MeshSegment& s : out.segments) sum += s.duration_fraction;
  for (MeshSegment& s : out.segments) s.duration_fraction /= sum;
  out.validate();
  return out;
}

Eigen::VectorXd propagate_solution(const Trajectory& traj, const Mesh& new_mesh,
                                   const BoxLimits& limits) {
  new_mesh.validate();
  const nlp::DecisionLayout layout(new_mesh);
  Eigen::VectorXd z(layout.dimension());
  z[0] = traj.t0;
  z[1] = traj.tf;
  const std::vector<double> times =
      collocation_times(new_mesh, traj.t0, traj.tf);
  const StateVec slo = limits.state_lower();
  const StateVec shi = limits.state_upper();
  const ControlVec clo = limits.control_lower();
  const ControlVec chi = limits.control_upper();
  int p = 0;
  for (int s = 0; s < layout.num_segments(); ++s) {
    for (int k = 0; k < layout.points_in_segment(s); ++k, ++p) {
      StateVec x = traj.state(times[p]);
      const double qn = x.segment<4>(6).norm();
      if (qn > 0.0) x.segment<4>(6) /= qn;
      z.segment<13>(layout.state_offset(s, k)) = x.cwiseMax(slo).cwiseMin(shi);
      const ControlVec u = traj.control(times[p]);
      z.segment<4>(layout.control_offset(s, k)) = u.cwiseMax(clo).cwiseMin(chi);
    }
  }
  return z;
}

namespace {

Mesh initial_mesh(Method method, GuessLevel level, const GridPath* path,
                  const RefineOptions& options) {
  if (method == Method::kPsm) {
    return Mesh::single_segment(options.psm_initial_degree);
  }
  if (level != GuessLevel::kSimple && path != nullptr) {
    const guess::TimeParameterization tp = guess::time_parameterize(
        *path, Eigen::Vector3d::Constant(2.0));
    std::vector<double> fractions;
    for (double d : tp.leg_durations) fractions.push_back(d / tp.tf);
    if (fractions.size() < 2) {
      fractions = {0.5, 0.5};
    }
    // Merge the shortest legs away; splitting re-adds segments later where
    // the relative error calls for them.
    const int cap = std::max(2, options.psem_max_initial_segments);
    while (static_cast<int>(fractions.size()) > cap) {
      std::size_t shortest = 0;
      for (std::size_t i = 1; i < fractions.size(); ++i) {
        if (fractions[i] < fractions[shortest]) shortest = i;
      }
      const std::size_t neighbor =
          (shortest == 0) ? 1
          : (shortest + 1 == fractions.size()) ? shortest - 1
          : (fractions[shortest - 1] <= fractions[shortest + 1]
                 ? shortest - 1
                 : shortest + 1);
      fractions[std::min(shortest, neighbor)] +=
          fractions[std::max(shortest, neighbor)];
      fractions.erase(fractions.begin() +
                      static_cast<long>(std::max(shortest, neighbor)));
    }
    double sum = 0.0;
    for (double f : fractions) sum += f;
    for (double& f : fractions) f /= sum;
    return Mesh::from_fractions(fractions, options.psem_min_degree);
  }
  return Mesh::uniform(options.psem_default_segments, options.psem_min_degree);
}

}  // namespace

PlanResult plan(const Scenario& scenario, const UavParams& params,
                Method method, GuessLevel level, bool constrained,
                const RefineOptions& options, const nlp::Weights& weights) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  PlanResult pr;
  pr.level = level;
  pr.constrained = constrained;
  pr.method = method;

  const GridPath* path = nullptr;
  if (level != GuessLevel::kSimple) {
    const GridMap inflated = env::inflate_for_planning(
        scenario.map, scenario.columns, env::safety_radius(params));
    const Eigen::Vector2i start_cell =
        scenario.map.cell_of(scenario.start.head<2>());
    const Eigen::Vector2i goal_cell =
        scenario.map.cell_of(scenario.goal.head<2>());
    const auto found = lts::plan(inflated, start_cell, goal_cell);
    if (!found) {
      pr.status = PlanStatus::kFailed;
      pr.failure_reason = "no grid path between start and goal";
      pr.total_wall_time = elapsed();
      return pr;
    }
    pr.seed_path = *found;
    path = &pr.seed_path;
  }

  Mesh mesh = initial_mesh(method, level, path, options);
  const BoxLimits limits = BoxLimits::for_scenario(scenario);

  Eigen::VectorXd z;
  {
    const InitialGuess g =
        guess::build_guess(scenario, params, mesh, level, constrained, path);
    z = nlp::to_decision_vector(g, nlp::DecisionLayout(mesh));
  }

  bool have_iterate = false;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const nlp::NlpProblem problem =
        nlp::build_nlp(scenario, params, mesh, weights);

    solver::SolveOptions sopt = options.solver;
    const double remaining = options.wall_clock_budget - elapsed();
    if (remaining <= 0.0) {
      pr.status = have_iterate ? PlanStatus::kTimeLimit : PlanStatus::kFailed;
      if (!have_iterate) pr.failure_reason = "wall budget exhausted";
      break;
    }
    sopt.wall_clock_budget = std::min(sopt.wall_clock_budget, remaining);

    const solver::SolveResult res = solver::solve(problem, z, sopt);
    pr.mesh_history.push_back(mesh);
    pr.solves.push_back(res);

    if (res.status == solver::SolveStatus::kNumericalFailure) {
      if (!have_iterate) {
        pr.status = PlanStatus::kFailed;
        pr.failure_reason = "solver failed on the first iteration";
        pr.iterations = iter;
        break;
      }
      pr.status = PlanStatus::kIterationLimit;  // best prior iterate stands
      break;
    }

    Trajectory traj;
    try {
      traj = nlp::extract_trajectory(res.point, mesh, problem.layout);
    } catch (const std::exception&) {
      if (!have_iterate) {
        pr.status = PlanStatus::kFailed;
        pr.failure_reason = "degenerate solution (tf collapsed)";
        pr.iterations = iter;
        break;
      }
      pr.status = PlanStatus::kIterationLimit;
      break;
    }

    ErrorReport report = absolute_errors(traj, mesh, params);
    relative_errors(report, traj);

    pr.trajectory = traj;
    pr.final_report = report;
    pr.iterations = iter;
    have_iterate = true;

    if (report.abs_max <= options.abs_tolerance) {
      pr.status = PlanStatus::kConverged;
      break;
    }
    if (iter == options.max_iterations) {
      pr.status = PlanStatus::kIterationLimit;
      break;
    }
    if (elapsed() >= options.wall_clock_budget) {
      pr.status = PlanStatus::kTimeLimit;
      break;
    }

    Mesh next = (method == Method::kPsm)
                    ? psm_refine(mesh, report, options.abs_tolerance)
                    : psem_refine(mesh, report, options.abs_tolerance,
                                  options.rel_split_tolerance,
                                  options.min_segment_duration);
    z = propagate_solution(traj, next, limits);
    mesh = next;
  }

  pr.total_wall_time = elapsed();
  return pr;
}

}  // namespace uavtraj::refine
