#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "uavtraj/guess.hpp"
#include "uavtraj/solver.hpp"
#include "uavtraj/transcribe.hpp"

using namespace uavtraj;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Hand-built little problems; only the callbacks the solver touches are set.
nlp::NlpProblem make_problem(int n, int me, int mi) {
  nlp::NlpProblem p;
  p.dimension = n;
  p.num_equalities = me;
  p.num_inequalities = mi;
  p.lower = Eigen::VectorXd::Constant(n, -kInf);
  p.upper = Eigen::VectorXd::Constant(n, kInf);
  p.variable_scales = Eigen::VectorXd::Ones(n);
  p.equality_constraints = [](const Eigen::VectorXd&, Eigen::VectorXd& out) {
    out.resize(0);
  };
  p.inequality_constraints = [](const Eigen::VectorXd&, Eigen::VectorXd& out) {
    out.resize(0);
  };
  return p;
}

}  // namespace

TEST_CASE("unconstrained convex quadratic") {
  // f(z) = (z0 - 3)^2 + 2 (z1 + 1)^2
  nlp::NlpProblem p = make_problem(2, 0, 0);
  p.objective = [](const Eigen::VectorXd& z) {
    return (z[0] - 3) * (z[0] - 3) + 2 * (z[1] + 1) * (z[1] + 1);
  };
  p.weighted_gradient = [](const Eigen::VectorXd& z, double sf,
                           const Eigen::VectorXd&, const Eigen::VectorXd&,
                           Eigen::VectorXd& grad) {
    grad.resize(2);
    grad[0] = sf * 2 * (z[0] - 3);
    grad[1] = sf * 4 * (z[1] + 1);
  };
  Eigen::VectorXd guess(2);
  guess << -10.0, 25.0;
  const auto res = solver::solve(p, guess, {});
  CHECK(res.status == solver::SolveStatus::kConverged);
  CHECK(res.point[0] == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(res.point[1] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(res.objective == doctest::Approx(0.0));
}

TEST_CASE("equality-constrained quadratic") {
  // min ||z||^2 s.t. z0 + z1 = 1  ->  z = (0.5, 0.5)
  nlp::NlpProblem p = make_problem(2, 1, 0);
  p.objective = [](const Eigen::VectorXd& z) { return z.squaredNorm(); };
  p.equality_constraints = [](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
    out.resize(1);
    out[0] = z[0] + z[1] - 1.0;
  };
  p.weighted_gradient = [](const Eigen::VectorXd& z, double sf,
                           const Eigen::VectorXd& we, const Eigen::VectorXd&,
                           Eigen::VectorXd& grad) {
    grad = sf * 2 * z;
    grad[0] += we[0];
    grad[1] += we[0];
  };
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(2);
  const auto res = solver::solve(p, guess, {});
  CHECK(res.status == solver::SolveStatus::kConverged);
  CHECK(res.point[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(res.point[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(res.max_constraint_violation <= 1e-6);
}

TEST_CASE("inequality-constrained quadratic") {
  // min ||z||^2 s.t. 1 - z0 <= 0  ->  z = (1, 0)
  nlp::NlpProblem p = make_problem(2, 0, 1);
  p.objective = [](const Eigen::VectorXd& z) { return z.squaredNorm(); };
  p.inequality_constraints = [](const Eigen::VectorXd& z,
                                Eigen::VectorXd& out) {
    out.resize(1);
    out[0] = 1.0 - z[0];
  };
  p.weighted_gradient = [](const Eigen::VectorXd& z, double sf,
                           const Eigen::VectorXd&, const Eigen::VectorXd& wi,
                           Eigen::VectorXd& grad) {
    grad = sf * 2 * z;
    grad[0] -= wi[0];
  };
  Eigen::VectorXd guess(2);
  guess << -2.0, 2.0;
  const auto res = solver::solve(p, guess, {});
  CHECK(res.status == solver::SolveStatus::kConverged);
  CHECK(res.point[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(res.point[1]) <= 1e-5);
}

TEST_CASE("bound-active minimum and exact bound respect") {
  // min (z - 2)^2 with z <= 1: minimizer pinned at the bound exactly.
  nlp::NlpProblem p = make_problem(1, 0, 0);
  p.upper[0] = 1.0;
  p.objective = [](const Eigen::VectorXd& z) {
    return (z[0] - 2) * (z[0] - 2);
  };
  p.weighted_gradient = [](const Eigen::VectorXd& z, double sf,
                           const Eigen::VectorXd&, const Eigen::VectorXd&,
                           Eigen::VectorXd& grad) {
    grad.resize(1);
    grad[0] = sf * 2 * (z[0] - 2);
  };
  Eigen::VectorXd guess(1);
  guess << -5.0;
  const auto res = solver::solve(p, guess, {});
  CHECK(res.status == solver::SolveStatus::kConverged);
  CHECK(res.point[0] == 1.0);  // exactly on the bound

  // A guess outside the bounds is clipped before the first iteration.
  Eigen::VectorXd outside(1);
  outside << 40.0;
  const auto res2 = solver::solve(p, outside, {});
  CHECK(res2.point[0] == 1.0);
}

TEST_CASE("rosenbrock with bounds") {
  nlp::NlpProblem p = make_problem(2, 0, 0);
  p.lower << -2.0, -2.0;
  p.upper << 2.0, 2.0;
  p.objective = [](const Eigen::VectorXd& z) {
    const double a = 1 - z[0];
    const double b = z[1] - z[0] * z[0];
    return a * a + 100 * b * b;
  };
  p.weighted_gradient = [](const Eigen::VectorXd& z, double sf,
                           const Eigen::VectorXd&, const Eigen::VectorXd&,
                           Eigen::VectorXd& grad) {
    grad.resize(2);
    const double b = z[1] - z[0] * z[0];
    grad[0] = sf * (-2 * (1 - z[0]) - 400 * z[0] * b);
    grad[1] = sf * 200 * b;
  };
  Eigen::VectorXd guess(2);
  guess << -1.2, 1.0;
  solver::SolveOptions opts;
  opts.max_iterations = 20000;
  const auto res = solver::solve(p, guess, opts);
  CHECK(res.status == solver::SolveStatus::kConverged);
  CHECK(res.point[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(res.point[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("determinism and reported objective") {
  nlp::NlpProblem p = make_problem(3, 1, 0);
  p.objective = [](const Eigen::VectorXd& z) {
    return z.squaredNorm() + 0.1 * z[0] * z[1];
  };
  p.equality_constraints = [](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
    out.resize(1);
    out[0] = z.sum() - 3.0;
  };
  p.weighted_gradient = [](const Eigen::VectorXd& z, double sf,
                           const Eigen::VectorXd& we, const Eigen::VectorXd&,
                           Eigen::VectorXd& grad) {
    grad = sf * 2 * z;
    grad[0] += sf * 0.1 * z[1];
    grad[1] += sf * 0.1 * z[0];
    grad.array() += we[0];
  };
  Eigen::VectorXd guess(3);
  guess << 5, -7, 0.3;
  const auto a = solver::solve(p, guess, {});
  const auto b = solver::solve(p, guess, {});
  CHECK(a.point == b.point);
  CHECK(a.iterations == b.iterations);
  CHECK(a.objective == doctest::Approx(p.objective(a.point)).epsilon(1e-12));
  CHECK(a.wall_time >= 0.0);
}

TEST_CASE("numerical failure at the guess") {
  nlp::NlpProblem p = make_problem(1, 0, 0);
  p.objective = [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  p.weighted_gradient = [](const Eigen::VectorXd&, double,
                           const Eigen::VectorXd&, const Eigen::VectorXd&,
                           Eigen::VectorXd& grad) { grad.setZero(1); };
  Eigen::VectorXd guess(1);
  guess << 0.0;
  const auto res = solver::solve(p, guess, {});
  CHECK(res.status == solver::SolveStatus::kNumericalFailure);

  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(solver::solve(p, wrong, {}), std::invalid_argument);
}

TEST_CASE("hover-to-hover transcription converges") {
  const Scenario scenario = env::make_random_columns_scenario(0, 2);
  const UavParams params = UavParams::crazyflie();
  const nlp::Weights weights = nlp::Weights::defaults();
  const Mesh mesh = Mesh::single_segment(12);
  const nlp::NlpProblem p = nlp::build_nlp(scenario, params, mesh, weights);

  const GridMap inflated = env::inflate_for_planning(
      scenario.map, scenario.columns, env::safety_radius(params));
  const auto path = lts::plan(inflated,
                              scenario.map.cell_of(scenario.start.head<2>()),
                              scenario.map.cell_of(scenario.goal.head<2>()));
  REQUIRE(path.has_value());
  const InitialGuess g = guess::build_guess(
      scenario, params, mesh, GuessLevel::kPosition, true, &*path);
  const Eigen::VectorXd z0 = nlp::to_decision_vector(g, p.layout);

  solver::SolveOptions opts;
  opts.max_iterations = 60000;
  opts.wall_clock_budget = 120.0;
  const auto res = solver::solve(p, z0, opts);
  CHECK(res.max_constraint_violation <= 1e-6);
  CHECK(res.point[1] > 0.0);
  CHECK(res.objective > 0.0);
}
