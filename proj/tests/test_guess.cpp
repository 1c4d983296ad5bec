#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uavtraj/guess.hpp"
#include "uavtraj/trajectory.hpp"

using namespace uavtraj;

namespace {

GridPath straight_path() {
  GridPath p;
  p.waypoints = {{0.0, 0.0}, {1.0, 2.0}};
  p.cost = std::sqrt(5.0);
  return p;
}

const UavParams kParams = UavParams::crazyflie();

}  // namespace

TEST_CASE("time parameterization") {
  const Eigen::Vector3d v_max(2.0, 2.0, 2.0);
  const auto tp = guess::time_parameterize(straight_path(), v_max);
  REQUIRE(tp.leg_durations.size() == 1);
  CHECK(tp.leg_durations[0] == doctest::Approx(1.0));  // max(0.5, 1.0)
  CHECK(tp.tf == doctest::Approx(1.0));

  GridPath with_dup;
  with_dup.waypoints = {{0, 0}, {0, 0}, {1, 0}, {1, 0}, {2, 0}};
  const auto tp2 = guess::time_parameterize(with_dup, v_max);
  CHECK(tp2.leg_durations.size() == 2);
  CHECK(tp2.waypoints.size() == 3);
  CHECK(tp2.tf == doctest::Approx(1.0));

  GridPath two_equal;
  two_equal.waypoints = {{0, 0}, {1, 0}, {2, 0}};
  const auto tp3 = guess::time_parameterize(two_equal, v_max);
  CHECK(tp3.tf == doctest::Approx(2.0 * tp3.leg_durations[0]).epsilon(1e-12));

  GridPath zero_length;
  zero_length.waypoints = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK_THROWS_AS(guess::time_parameterize(zero_length, v_max),
                  std::invalid_argument);
  CHECK_THROWS_AS(guess::time_parameterize(straight_path(), {0.0, 1.0, 1.0}),
                  std::invalid_argument);

  // Per-leg speed never exceeds the per-axis limit.
  GridPath jagged;
  jagged.waypoints = {{0, 0}, {0.75, 0.25}, {1.0, 1.5}, {-0.5, 1.75}};
  const auto tp4 = guess::time_parameterize(jagged, v_max);
  double total = 0.0;
  for (std::size_t i = 0; i < tp4.leg_durations.size(); ++i) {
    const Eigen::Vector2d delta = tp4.waypoints[i + 1] - tp4.waypoints[i];
    CHECK(std::abs(delta.x()) / tp4.leg_durations[i] <= 2.0 + 1e-12);
    CHECK(std::abs(delta.y()) / tp4.leg_durations[i] <= 2.0 + 1e-12);
    total += tp4.leg_durations[i];
  }
  CHECK(std::abs(tp4.tf - total) <= 1e-12);
}

TEST_CASE("z interpolation") {
  CHECK(guess::interpolate_z(0.0, 0.0, 2.0, 0.5, 1.5) == 0.5);
  CHECK(guess::interpolate_z(2.0, 0.0, 2.0, 0.5, 1.5) == 1.5);
  CHECK(guess::interpolate_z(1.0, 0.0, 2.0, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(guess::interpolate_z(0.0, 1.0, 1.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("position spline") {
  const auto tp = guess::time_parameterize(straight_path(), {2, 2, 2});
  const auto spline = guess::fit_position_spline(tp, 1.0, 1.0);

  // Two waypoints: midpoint is the arithmetic mean.
  const Eigen::Vector3d mid = spline.value(0.5 * tp.tf);
  CHECK(mid.x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mid.z() == doctest::Approx(1.0));

  // Interpolates every waypoint, clamped ends have zero velocity.
  GridPath multi;
  multi.waypoints = {{0, 0}, {0.5, 0.25}, {1.25, 0.5}, {1.5, 1.5}};
  const auto tpm = guess::time_parameterize(multi, {2, 2, 2});
  const auto sm = guess::fit_position_spline(tpm, 1.0, 1.0);
  double t = 0.0;
  for (std::size_t i = 0; i < tpm.waypoints.size(); ++i) {
    const Eigen::Vector3d v = sm.value(t);
    CHECK(std::abs(v.x() - tpm.waypoints[i].x()) <= 1e-9);
    CHECK(std::abs(v.y() - tpm.waypoints[i].y()) <= 1e-9);
    if (i < tpm.leg_durations.size()) t += tpm.leg_durations[i];
  }
  CHECK(sm.derivative(0.0).head<2>().norm() <= 1e-9);
  CHECK(sm.derivative(tpm.tf).head<2>().norm() <= 1e-9);

  // Degenerate duplicated knots are rejected by the spline itself.
  CHECK_THROWS_AS(CubicSpline({0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("velocity is the spline derivative") {
  GridPath multi;
  multi.waypoints = {{0, 0}, {1, 0.5}, {1.75, 1.75}};
  const auto tp = guess::time_parameterize(multi, {2, 2, 2});
  const auto spline = guess::fit_position_spline(tp, 1.0, 1.0);
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(tp.tf * i / 20.0);
  const auto vel = guess::build_velocity(spline, times);
  // Finite-difference cross-check of the analytic derivative.
  const double h = 1e-6;
  for (int i = 1; i < 20; ++i) {
    const Eigen::Vector3d fd =
        (spline.value(times[i] + h) - spline.value(times[i] - h)) / (2 * h);
    CHECK((vel[i] - fd).norm() <= 1e-6);
  }
  CHECK(vel.front().norm() <= 1e-9);
  CHECK(vel.back().norm() <= 1e-9);
}

TEST_CASE("orientation from expected force") {
  // Hover: force along +z, identity attitude.
  const auto hover =
      guess::build_orientation({Eigen::Vector3d::Zero()}, kParams);
  CHECK(hover[0].w == doctest::Approx(1.0));
  CHECK(std::abs(hover[0].x) + std::abs(hover[0].y) + std::abs(hover[0].z) <=
        1e-12);

  // Force along +x: quarter turn about y.
  const Eigen::Vector3d ax(1e6, 0.0, -kParams.gravity);  // cancels gravity
  const auto qx = guess::build_orientation({ax}, kParams);
  CHECK(qx[0].w == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK(qx[0].y == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));

  // The rotation really maps body z onto the force direction.
  const Eigen::Vector3d accel(1.0, -2.0, 0.5);
  const auto q = guess::build_orientation({accel}, kParams);
  const Eigen::Vector3d dir =
      (accel + Eigen::Vector3d(0, 0, kParams.gravity)).normalized();
  const Eigen::Vector3d mapped = rotate_body_to_local(q[0], {0, 0, 1});
  CHECK((mapped - dir).norm() <= 1e-12);
  CHECK(std::abs(quat_norm(q[0]) - 1.0) <= 1e-12);
  CHECK(q[0].w >= 0.0);

  // Antiparallel force falls back to the previous sample.
  const Eigen::Vector3d down(0.0, 0.0, -kParams.gravity - 5.0);
  const auto qf = guess::build_orientation({accel, down}, kParams);
  CHECK(qf[1].w == qf[0].w);
  CHECK(qf[1].x == qf[0].x);
  // At the front it falls back to identity.
  const auto qf0 = guess::build_orientation({down}, kParams);
  CHECK(qf0[0].w == 1.0);
}

TEST_CASE("angular rate from quaternion samples") {
  // Constant attitude gives zero rate.
  std::vector<Quat> constant(5, Quat::identity());
  std::vector<double> times{0.0, 0.1, 0.25, 0.3, 0.5};
  for (const auto& w : guess::build_angular_rate(constant, times)) {
    CHECK(w.norm() <= 1e-12);
  }

  // Uniform spin about z at 1 rad/s.
  std::vector<Quat> spin;
  std::vector<double> st;
  for (int i = 0; i <= 40; ++i) {
    const double t = i * 0.01;
    st.push_back(t);
    spin.push_back({std::cos(0.5 * t), 0.0, 0.0, std::sin(0.5 * t)});
  }
  const auto omegas = guess::build_angular_rate(spin, st);
  for (const auto& w : omegas) {
    CHECK(w.x() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(w.y() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(w.z() == doctest::Approx(1.0).epsilon(1e-4));
  }

  // 2 gamma(q) q_dot = -2 gamma(q_dot) q, as an algebraic identity.
  for (std::size_t i = 0; i < spin.size(); ++i) {
    // reconstruct the finite-difference q_dot the builder used
    const std::size_t a = (i == 0) ? 0 : (i == spin.size() - 1 ? i - 2 : i - 1);
    (void)a;
  }
  // Check the identity directly on analytic samples.
  for (int i = 0; i <= 10; ++i) {
    const double t = i * 0.05;
    const Quat q{std::cos(0.5 * t), 0.0, 0.0, std::sin(0.5 * t)};
    const Eigen::Vector4d qdot(-0.5 * std::sin(0.5 * t), 0.0, 0.0,
                               0.5 * std::cos(0.5 * t));
    const Quat qd{qdot[0], qdot[1], qdot[2], qdot[3]};
    const Eigen::Vector4d qv(q.w, q.x, q.y, q.z);
    const Eigen::Vector3d lhs = 2.0 * gamma_matrix(q) * qdot;
    const Eigen::Vector3d rhs = -2.0 * gamma_matrix(qd) * qv;
    CHECK((lhs - rhs).norm() <= 1e-9);
  }
}

TEST_CASE("thrust from rotated force") {
  // Hover: thrust equals m*g.
  const double mg = kParams.mass * kParams.gravity;
  const auto hover = guess::build_thrust({Quat::identity()},
                                         {Eigen::Vector3d(0, 0, mg)});
  CHECK(hover[0] == doctest::Approx(mg).epsilon(1e-15));

  // With the built orientation, the body force is purely along z.
  const Eigen::Vector3d accel(1.5, -0.5, 0.3);
  const Eigen::Vector3d force =
      kParams.mass * (accel + Eigen::Vector3d(0, 0, kParams.gravity));
  const auto q = guess::build_orientation({accel}, kParams);
  const Eigen::Vector3d body = rotate_local_to_body(q[0], force);
  CHECK(std::abs(body.x()) <= 1e-9);
  CHECK(std::abs(body.y()) <= 1e-9);
  const auto thrust = guess::build_thrust(q, {force});
  CHECK(thrust[0] == doctest::Approx(force.norm()).epsilon(1e-9));

  const auto zero = guess::build_thrust({Quat::identity()},
                                        {Eigen::Vector3d::Zero()});
  CHECK(zero[0] == 0.0);
}

TEST_CASE("torque from rotational dynamics") {
  std::vector<double> times{0.0, 0.1, 0.2, 0.3};
  std::vector<Eigen::Vector3d> zero(4, Eigen::Vector3d::Zero());
  for (const auto& tau : guess::build_torque(zero, times, kParams)) {
    CHECK(tau.norm() == 0.0);
  }

  // Constant spin about body z: both terms vanish.
  std::vector<Eigen::Vector3d> spin(4, Eigen::Vector3d(0, 0, 2.0));
  for (const auto& tau : guess::build_torque(spin, times, kParams)) {
    CHECK(tau.norm() <= 1e-18);
  }

  // Constant angular acceleration about x from rest: tau = I_x * wdot.
  std::vector<Eigen::Vector3d> ramp;
  for (double t : times) ramp.push_back({t, 0.0, 0.0});
  const auto torque = guess::build_torque(ramp, times, kParams);
  CHECK(torque[0].x() ==
        doctest::Approx(kParams.inertia_diag[0]).epsilon(1e-9));
  // omega x I omega is zero along a single axis, so y/z components come
  // only from the (zero) cross term.
  CHECK(std::abs(torque[0].y()) <= 1e-18);
}

TEST_CASE("simple guess") {
  const Scenario scenario = env::make_two_obstacle_scenario();
  const Mesh mesh = Mesh::single_segment(10);
  const InitialGuess g = guess::build_simple(scenario, kParams, mesh);
  CHECK(g.tf == doctest::Approx(90.0));
  CHECK(static_cast<int>(g.states.size()) == mesh.total_points());

  // Quaternion is identity everywhere; velocity zero; thrust m*g.
  for (const auto& s : g.states) {
    CHECK(s.attitude.w == 1.0);
    CHECK(s.velocity.norm() == 0.0);
  }
  for (const auto& c : g.controls) {
    CHECK(c.thrust_z == doctest::Approx(kParams.mass * kParams.gravity));
    CHECK(c.torque.norm() == 0.0);
  }
  CHECK(g.states.front().position.isApprox(scenario.start));
  CHECK(g.states.back().position.isApprox(scenario.goal));
}

TEST_CASE("clamping") {
  const Scenario scenario = env::make_two_obstacle_scenario();
  const BoxLimits limits = BoxLimits::for_scenario(scenario);
  const BoundaryConditions bc =
      BoundaryConditions::hover_to_hover(scenario, kParams);
  const Mesh mesh = Mesh::single_segment(6);

  InitialGuess g = guess::build_simple(scenario, kParams, mesh);
  g.states[2].velocity = {3.0, -5.0, 0.1};
  g.controls[2].thrust_z = 2.0;
  const InitialGuess clamped = guess::clamp_to_constraints(g, limits, bc);
  CHECK(clamped.constrained);
  CHECK(clamped.states[2].velocity.x() == 2.0);
  CHECK(clamped.states[2].velocity.y() == -2.0);
  CHECK(clamped.states[2].velocity.z() == doctest::Approx(0.1));
  CHECK(clamped.controls[2].thrust_z == 0.6);
  CHECK(clamped.controls.front().thrust_z ==
        doctest::Approx(kParams.mass * kParams.gravity).epsilon(1e-15));
  CHECK(clamped.states.front().position.isApprox(scenario.start));
  CHECK(clamped.states.back().position.isApprox(scenario.goal));
}

TEST_CASE("full hierarchy on the straight-line scenario") {
  const Scenario scenario = env::make_random_columns_scenario(0, 3);
  const GridMap inflated = env::inflate_for_planning(
      scenario.map, scenario.columns, env::safety_radius(kParams));
  const auto path = lts::plan(inflated,
                              scenario.map.cell_of(scenario.start.head<2>()),
                              scenario.map.cell_of(scenario.goal.head<2>()));
  REQUIRE(path.has_value());

  const Mesh mesh = Mesh::single_segment(20);
  for (GuessLevel level :
       {GuessLevel::kPosition, GuessLevel::kVelocity, GuessLevel::kOrientation,
        GuessLevel::kAngularRate, GuessLevel::kAngularRateControl}) {
    const InitialGuess g = guess::build_guess(scenario, kParams, mesh, level,
                                              true, &*path);
    CHECK(static_cast<int>(g.states.size()) == mesh.total_points());
    CHECK(g.tf > 0.0);
    CHECK(g.tf < 90.0);
    for (const auto& s : g.states) {
      CHECK(std::abs(quat_norm(s.attitude) - 1.0) <= 1e-12);
      CHECK(s.attitude.w >= 0.0);
    }
    for (const auto& c : g.controls) {
      CHECK(c.thrust_z >= 0.0);
      CHECK(c.thrust_z <= 0.6);
    }
    CHECK(g.controls.front().thrust_z ==
          doctest::Approx(kParams.mass * kParams.gravity).epsilon(1e-15));
    CHECK(g.controls.back().thrust_z ==
          doctest::Approx(kParams.mass * kParams.gravity).epsilon(1e-15));
  }

  // Velocity hierarchy: samples equal the analytic spline derivative.
  const auto tp = guess::time_parameterize(*path, {2, 2, 2});
  const auto spline =
      guess::fit_position_spline(tp, scenario.start.z(), scenario.goal.z());
  const InitialGuess gv = guess::build_guess(scenario, kParams, mesh,
                                             GuessLevel::kVelocity, false,
                                             &*path);
  const std::vector<double> times = collocation_times(mesh, 0.0, gv.tf);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK((gv.states[i].velocity - spline.derivative(times[i])).norm() <=
          1e-9);
  }

  // Guess levels below Velocity keep the simple constructions.
  const InitialGuess gp = guess::build_guess(scenario, kParams, mesh,
                                             GuessLevel::kPosition, false,
                                             &*path);
  for (const auto& s : gp.states) {
    CHECK(s.velocity.norm() == 0.0);
    CHECK(s.attitude.w == 1.0);
  }
  CHECK_THROWS_AS(guess::build_guess(scenario, kParams, mesh,
                                     GuessLevel::kPosition, false, nullptr),
                  std::invalid_argument);
}
