#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavtraj/cubic_spline.hpp"
#include "uavtraj/dynamics.hpp"
#include "uavtraj/environment.hpp"
#include "uavtraj/lazy_theta_star.hpp"
#include "uavtraj/limits.hpp"
#include "uavtraj/mesh.hpp"

namespace uavtraj {

/// How much of the model feeds the seed, cumulatively: each level keeps the
/// constructions of the levels below it. AngularRateControl adds the thrust
/// and torque rows on top of the full state hierarchy.
enum class GuessLevel {
  kSimple,
  kPosition,
  kVelocity,
  kOrientation,
  kAngularRate,
  kAngularRateControl,
};

const char* to_string(GuessLevel level);
std::optional<GuessLevel> guess_level_from_string(std::string_view name);

/// Seed trajectory sampled at the collocation points of a mesh.
struct InitialGuess {
  Mesh mesh;
  double t0 = 0.0;
  double tf = 0.0;
  std::vector<UavState> states;      // one per collocation point
  std::vector<UavControl> controls;  // one per collocation point
  GuessLevel level = GuessLevel::kSimple;
  bool constrained = false;
};

namespace guess {

/// Leg durations from per-axis speed limits. Zero-length legs are dropped
/// together with their duplicate waypoints so spline knots stay distinct.
struct TimeParameterization {
  std::vector<double> leg_durations;
  double tf = 0.0;
  std::vector<Eigen::Vector2d> waypoints;
};

TimeParameterization time_parameterize(const GridPath& path,
                                       const Eigen::Vector3d& v_max);

double interpolate_z(double t, double t0, double tf, double z0, double zf);

/// Clamped xy splines through the waypoints plus linear z.
struct PositionSpline {
  CubicSpline x;
  CubicSpline y;
  double z0 = 0.0;
  double zf = 0.0;
  double t0 = 0.0;
  double tf = 0.0;

  Eigen::Vector3d value(double t) const;
  Eigen::Vector3d derivative(double t) const;
  Eigen::Vector3d acceleration(double t) const;
};

PositionSpline fit_position_spline(const TimeParameterization& tp, double z0,
                                   double zf);

std::vector<Eigen::Vector3d> build_position(const PositionSpline& spline,
                                            const std::vector<double>& times);
std::vector<Eigen::Vector3d> build_velocity(const PositionSpline& spline,
                                            const std::vector<double>& times);

/// Minimal rotation taking body z to the direction of the expected force;
/// unit quaternions with nonnegative scalar part. A vanishing or antiparallel
/// force falls back to the previous sample (identity at the front).
std::vector<Quat> build_orientation(
    const std::vector<Eigen::Vector3d>& accelerations, const UavParams& params);

/// omega = 2 gamma(q) q_dot with q_dot from three-point finite differences
/// on the (nonuniform, strictly increasing) sample times. Hemisphere flips
/// are repaired before differencing.
std::vector<Eigen::Vector3d> build_angular_rate(
    const std::vector<Quat>& quats, const std::vector<double>& times);

/// Body-frame z component of the expected force.
std::vector<double> build_thrust(const std::vector<Quat>& quats,
                                 const std::vector<Eigen::Vector3d>& forces);

/// tau = I omega_dot + omega x I omega with omega_dot by finite differences.
std::vector<Eigen::Vector3d> build_torque(
    const std::vector<Eigen::Vector3d>& omegas,
    const std::vector<double>& times, const UavParams& params);

InitialGuess build_simple(const Scenario& scenario, const UavParams& params,
                          const Mesh& mesh);

/// Clip samples into the boxes and pin the first and last points to the
/// boundary conditions exactly.
InitialGuess clamp_to_constraints(InitialGuess guess, const BoxLimits& limits,
                                  const BoundaryConditions& bc);

/// Assemble the guess for a level; path is required above Simple.
InitialGuess build_guess(const Scenario& scenario, const UavParams& params,
                         const Mesh& mesh, GuessLevel level, bool constrained,
                         const GridPath* path);

}  // namespace guess
}  // namespace uavtraj
