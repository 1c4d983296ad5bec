#include "uavtraj/guess.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uavtraj/trajectory.hpp"

namespace uavtraj {

const char* to_string(GuessLevel level) {
  switch (level) {
    case GuessLevel::kSimple: return "simple";
    case GuessLevel::kPosition: return "position";
    case GuessLevel::kVelocity: return "velocity";
    case GuessLevel::kOrientation: return "orientation";
    case GuessLevel::kAngularRate: return "angular_rate";
    case GuessLevel::kAngularRateControl: return "angular_rate_control";
  }
  return "unknown";
}

std::optional<GuessLevel> guess_level_from_string(std::string_view name) {
  if (name == "simple") return GuessLevel::kSimple;
  if (name == "position") return GuessLevel::kPosition;
  if (name == "velocity") return GuessLevel::kVelocity;
  if (name == "orientation") return GuessLevel::kOrientation;
  if (name == "angular_rate") return GuessLevel::kAngularRate;
  if (name == "angular_rate_control") return GuessLevel::kAngularRateControl;
  return std::nullopt;
}

namespace guess {

namespace {

// Derivative of the quadratic through three samples, evaluated at t.
double three_point_derivative(double t, double ta, double fa, double tb,
                              double fb, double tc, double fc) {
  const double la = (2.0 * t - tb - tc) / ((ta - tb) * (ta - tc));
  const double lb = (2.0 * t - ta - tc) / ((tb - ta) * (tb - tc));
  const double lc = (2.0 * t - ta - tb) / ((tc - ta) * (tc - tb));
  return fa * la + fb * lb + fc * lc;
}

// Component-wise finite-difference derivative of vector-valued samples.
template <typename V>
std::vector<V> sample_derivative(const std::vector<V>& values,
                                 const std::vector<double>& times, int dim) {
  const std::size_t n = values.size();
  if (times.size() != n) {
    throw std::invalid_argument("sample_derivative: size mismatch");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("sample_derivative: times must increase");
    }
  }
  std::vector<V> out(n);
  if (n == 1) {
    out[0] = values[0];
    for (int c = 0; c < dim; ++c) out[0][c] = 0.0;
    return out;
  }
  if (n == 2) {
    const double h = times[1] - times[0];
    for (std::size_t i = 0; i < 2; ++i) {
      out[i] = values[0];
      for (int c = 0; c < dim; ++c) {
        out[i][c] = (values[1][c] - values[0][c]) / h;
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = (i == 0) ? 0 : (i == n - 1 ? n - 3 : i - 1);
    out[i] = values[i];
    for (int c = 0; c < dim; ++c) {
      out[i][c] = three_point_derivative(
          times[i], times[a], values[a][c], times[a + 1], values[a + 1][c],
          times[a + 2], values[a + 2][c]);
    }
  }
  return out;
}

}  // namespace

TimeParameterization time_parameterize(const GridPath& path,
                                       const Eigen::Vector3d& v_max) {
  if (path.waypoints.size() < 2) {
    throw std::invalid_argument("time_parameterize: need >= 2 waypoints");
  }
  if (!(v_max.minCoeff() > 0.0)) {
    throw std::invalid_argument("time_parameterize: v_max must be positive");
  }
  TimeParameterization tp;
  tp.waypoints.push_back(path.waypoints.front());
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    const Eigen::Vector2d delta = path.waypoints[i] - tp.waypoints.back();
    const double dt = std::max(std::abs(delta.x()) / v_max.x(),
                               std::abs(delta.y()) / v_max.y());
    if (dt == 0.0) continue;  // coincident waypoint, drop the leg
    tp.leg_durations.push_back(dt);
    tp.waypoints.push_back(path.waypoints[i]);
    tp.tf += dt;
  }
  if (tp.leg_durations.empty()) {
    throw std::invalid_argument("time_parameterize: path has zero length");
  }
  return tp;
}

double interpolate_z(double t, double t0, double tf, double z0, double zf) {
  if (!(tf > t0)) {
    throw std::invalid_argument("interpolate_z requires tf > t0");
  }
  return z0 + (t - t0) / (tf - t0) * (zf - z0);
}

Eigen::Vector3d PositionSpline::value(double t) const {
  return {x.value(t), y.value(t), interpolate_z(t, t0, tf, z0, zf)};
}

Eigen::Vector3d PositionSpline::derivative(double t) const {
  return {x.derivative(t), y.derivative(t), (zf - z0) / (tf - t0)};
}

Eigen::Vector3d PositionSpline::acceleration(double t) const {
  return {x.second_derivative(t), y.second_derivative(t), 0.0};
}

PositionSpline fit_position_spline(const TimeParameterization& tp, double z0,
                                   double zf) {
  std::vector<double> knots(tp.waypoints.size());
  std::vector<double> xs(tp.waypoints.size());
  std::vector<double> ys(tp.waypoints.size());
  knots[0] = 0.0;
  for (std::size_t i = 0; i < tp.leg_durations.size(); ++i) {
    knots[i + 1] = knots[i] + tp.leg_durations[i];
  }
  for (std::size_t i = 0; i < tp.waypoints.size(); ++i) {
    xs[i] = tp.waypoints[i].x();
    ys[i] = tp.waypoints[i].y();
  }
  return PositionSpline{CubicSpline(knots, xs, 0.0, 0.0),
                        CubicSpline(knots, ys, 0.0, 0.0),
                        z0,
                        zf,
                        0.0,
                        knots.back()};
}

std::vector<Eigen::Vector3d> build_position(const PositionSpline& spline,
                                            const std::vector<double>& times) {
  std::vector<Eigen::Vector3d> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i] = spline.value(times[i]);
  }
  return out;
}

std::vector<Eigen::Vector3d> build_velocity(const PositionSpline& spline,
                                            const std::vector<double>& times) {
  std::vector<Eigen::Vector3d> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out[i] = spline.derivative(times[i]);
  }
  return out;
}

std::vector<Quat> build_orientation(
    const std::vector<Eigen::Vector3d>& accelerations,
    const UavParams& params) {
  std::vector<Quat> out(accelerations.size());
  Quat previous = Quat::identity();
  for (std::size_t i = 0; i < accelerations.size(); ++i) {
    const Eigen::Vector3d force =
        params.mass *
        (accelerations[i] + Eigen::Vector3d(0.0, 0.0, params.gravity));
    const double norm = force.norm();
    if (norm == 0.0) {
      out[i] = previous;
      continue;
    }
    const Eigen::Vector3d dir = force / norm;
    // Minimal rotation from body z onto the force direction:
    // q ~ [1 + e_z . dir ; e_z x dir], normalized.
    const double dot = dir.z();
    const double denom_sq = 2.0 * (1.0 + dot);
    if (denom_sq <= 1e-12) {
      out[i] = previous;  // antiparallel, rotation axis undefined
      continue;
    }
    const double scale = 1.0 / std::sqrt(denom_sq);
    Quat q{(1.0 + dot) * scale, -dir.y() * scale, dir.x() * scale, 0.0};
    q = quat_normalized(q);
    if (q.w < 0.0) {
      q = {-q.w, -q.x, -q.y, -q.z};
    }
    out[i] = q;
    previous = q;
  }
  return out;
}

std::vector<Eigen::Vector3d> build_angular_rate(
    const std::vector<Quat>& quats, const std::vector<double>& times) {
  // Repair hemisphere flips before differencing.
  std::vector<Eigen::Vector4d> q(quats.size());
  for (std::size_t i = 0; i < quats.size(); ++i) {
    q[i] << quats[i].w, quats[i].x, quats[i].y, quats[i].z;
    if (i > 0 && q[i].dot(q[i - 1]) < 0.0) q[i] = -q[i];
  }
  const std::vector<Eigen::Vector4d> qdot = sample_derivative(q, times, 4);
  std::vector<Eigen::Vector3d> out(quats.size());
  for (std::size_t i = 0; i < quats.size(); ++i) {
    const Quat qi{q[i][0], q[i][1], q[i][2], q[i][3]};
    out[i] = 2.0 * gamma_matrix(qi) * qdot[i];
  }
  return out;
}

std::vector<double> build_thrust(const std::vector<Quat>& quats,
                                 const std::vector<Eigen::Vector3d>& forces) {
  if (quats.size() != forces.size()) {
    throw std::invalid_argument("build_thrust: size mismatch");
  }
  std::vector<double> out(quats.size());
  for (std::size_t i = 0; i < quats.size(); ++i) {
    out[i] = rotate_local_to_body(quats[i], forces[i]).z();
  }
  return out;
}

std::vector<Eigen::Vector3d> build_torque(
    const std::vector<Eigen::Vector3d>& omegas,
    const std::vector<double>& times, const UavParams& params) {
  const std::vector<Eigen::Vector3d> wdot =
      sample_derivative(omegas, times, 3);
  const Eigen::Vector3d inertia = params.inertia_diag;
  std::vector<Eigen::Vector3d> out(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const Eigen::Vector3d& w = omegas[i];
    out[i] = inertia.cwiseProduct(wdot[i]) + w.cross(inertia.cwiseProduct(w));
  }
  return out;
}

InitialGuess build_simple(const Scenario& scenario, const UavParams& params,
                          const Mesh& mesh) {
  mesh.validate();
  const BoundaryConditions bc =
      BoundaryConditions::hover_to_hover(scenario, params);
  InitialGuess g;
  g.mesh = mesh;
  g.level = GuessLevel::kSimple;
  g.t0 = 0.0;
  g.tf = 0.5 * params.max_flight_time;
  const std::vector<double> times = collocation_times(mesh, g.t0, g.tf);
  const StateVec x0 = pack_state(bc.initial_state);
  const StateVec xf = pack_state(bc.final_state);
  const ControlVec u0 = pack_control(bc.initial_control);
  const ControlVec uf = pack_control(bc.final_control);
  g.states.reserve(times.size());
  g.controls.reserve(times.size());
  for (double t : times) {
    const double a = (t - g.t0) / (g.tf - g.t0);
    g.states.push_back(unpack_state(x0 + a * (xf - x0)));
    g.controls.push_back(unpack_control(u0 + a * (uf - u0)));
  }
  return g;
}

InitialGuess clamp_to_constraints(InitialGuess guess, const BoxLimits& limits,
                                  const BoundaryConditions& bc) {
  const StateVec slo = limits.state_lower();
  const StateVec shi = limits.state_upper();
  const ControlVec clo = limits.control_lower();
  const ControlVec chi = limits.control_upper();
  for (UavState& s : guess.states) {
    s = unpack_state(pack_state(s).cwiseMax(slo).cwiseMin(shi));
  }
  for (UavControl& c : guess.controls) {
    c = unpack_control(pack_control(c).cwiseMax(clo).cwiseMin(chi));
  }
  guess.states.front() = bc.initial_state;
  guess.states.back() = bc.final_state;
  guess.controls.front() = bc.initial_control;
  guess.controls.back() = bc.final_control;
  guess.constrained = true;
  return guess;
}

InitialGuess build_guess(const Scenario& scenario, const UavParams& params,
                         const Mesh& mesh, GuessLevel level, bool constrained,
                         const GridPath* path) {
  const BoundaryConditions bc =
      BoundaryConditions::hover_to_hover(scenario, params);
  const BoxLimits limits = BoxLimits::for_scenario(scenario);

  InitialGuess g;
  if (level == GuessLevel::kSimple) {
    g = build_simple(scenario, params, mesh);
  } else {
    if (path == nullptr) {
      throw std::invalid_argument("build_guess: level needs a seed path");
    }
    mesh.validate();
    const Eigen::Vector3d v_max =
        Eigen::Vector3d::Constant(limits.velocity_abs);
    const TimeParameterization tp = time_parameterize(*path, v_max);
    const PositionSpline spline =
        fit_position_spline(tp, scenario.start.z(), scenario.goal.z());

    g.mesh = mesh;
    g.level = level;
    g.t0 = 0.0;
    g.tf = tp.tf;
    const std::vector<double> times = collocation_times(mesh, g.t0, g.tf);

    // Work on the deduplicated time grid so finite differences stay well
    // defined across segment interfaces, then scatter back.
    std::vector<double> utimes;
    std::vector<std::size_t> scatter(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (utimes.empty() || times[i] != utimes.back()) {
        utimes.push_back(times[i]);
      }
      scatter[i] = utimes.size() - 1;
    }

    const std::vector<Eigen::Vector3d> pos = build_position(spline, utimes);
    std::vector<Eigen::Vector3d> vel(utimes.size(), Eigen::Vector3d::Zero());
    if (level >= GuessLevel::kVelocity) {
      vel = build_velocity(spline, utimes);
    }
    std::vector<Eigen::Vector3d> accel(utimes.size());
    std::vector<Eigen::Vector3d> forces(utimes.size());
    for (std::size_t i = 0; i < utimes.size(); ++i) {
      accel[i] = spline.acceleration(utimes[i]);
      forces[i] = params.mass *
                  (accel[i] + Eigen::Vector3d(0.0, 0.0, params.gravity));
    }
    std::vector<Quat> quats(utimes.size(), Quat::identity());
    if (level >= GuessLevel::kOrientation) {
      quats = build_orientation(accel, params);
    }
    std::vector<Eigen::Vector3d> omegas(utimes.size(),
                                        Eigen::Vector3d::Zero());
    if (level >= GuessLevel::kAngularRate) {
      omegas = build_angular_rate(quats, utimes);
    }
    std::vector<double> thrust(utimes.size(),
                               params.mass * params.gravity);
    std::vector<Eigen::Vector3d> torque(utimes.size(),
                                        Eigen::Vector3d::Zero());
    if (level == GuessLevel::kAngularRateControl) {
      thrust = build_thrust(quats, forces);
      torque = build_torque(omegas, utimes, params);
    }

    g.states.resize(times.size());
    g.controls.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      const std::size_t j = scatter[i];
      g.states[i].position = pos[j];
      g.states[i].velocity = vel[j];
      g.states[i].attitude = quats[j];
      g.states[i].angular_rate = omegas[j];
      g.controls[i].thrust_z = thrust[j];
      g.controls[i].torque = torque[j];
    }
  }

  if (constrained) {
    g = clamp_to_constraints(std::move(g), limits, bc);
  }
  return g;
}

}  // namespace guess
}  // namespace uavtraj
