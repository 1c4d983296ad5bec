#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uavtraj/metrics.hpp"

using namespace uavtraj;

namespace {

const UavParams kParams = UavParams::crazyflie();
const nlp::Weights kWeights = nlp::Weights::defaults();

// A result whose trajectory rests at the goal under hover thrust.
refine::PlanResult resting_result(const Scenario& scenario, int degree,
                                  double tf) {
  refine::PlanResult r;
  r.status = refine::PlanStatus::kConverged;
  r.iterations = 1;
  r.total_wall_time = 1.0;
  Trajectory traj;
  traj.t0 = 0.0;
  traj.tf = tf;
  Trajectory::Segment seg;
  seg.grid = cheb::scale_grid(cheb::make_grid(degree), 0.0, tf);
  UavState rest;
  rest.position = scenario.goal;
  UavControl u;
  u.thrust_z = kParams.mass * kParams.gravity;
  seg.states.resize(13, degree + 1);
  seg.controls.resize(4, degree + 1);
  for (int k = 0; k <= degree; ++k) {
    seg.states.col(k) = pack_state(rest);
    seg.controls.col(k) = pack_control(u);
  }
  seg.state_derivs = seg.states * seg.grid.scaled_diff.transpose();
  traj.segments.push_back(std::move(seg));
  r.trajectory = std::move(traj);
  return r;
}

metrics::EvaluationRow sample_row(double criterion, double time) {
  metrics::EvaluationRow row;
  row.criterion = criterion;
  row.total_time = time;
  row.iterations = 3;
  return row;
}

}  // namespace

TEST_CASE("evaluate a resting trajectory") {
  const Scenario scenario = env::make_two_obstacle_scenario();
  const refine::PlanResult r = resting_result(scenario, 8, 5.0);
  const metrics::EvaluationRow row =
      metrics::evaluate(r, scenario, kParams, kWeights);
  CHECK(row.criterion == doctest::Approx(0.0));
  CHECK(row.sum_violation == doctest::Approx(0.0));
  CHECK(row.obstacle_violation == doctest::Approx(0.0));
  CHECK(row.iterations == 1);
  CHECK(row.total_time == 1.0);

  // Re-evaluation is pure: identical rows.
  const metrics::EvaluationRow again =
      metrics::evaluate(r, scenario, kParams, kWeights);
  CHECK(again.criterion == row.criterion);
  CHECK(again.sum_violation == row.sum_violation);
}

TEST_CASE("grazing a column shows up in the obstacle subset") {
  const Scenario scenario = env::make_two_obstacle_scenario();
  refine::PlanResult r = resting_result(scenario, 8, 5.0);
  // Park the whole trajectory just inside the first inflated column.
  const Column& col = scenario.columns[0];
  const double r_safe = env::safety_radius(kParams);
  const double depth = col.radius + r_safe - 0.01;
  for (int k = 0; k < r.trajectory.segments[0].states.cols(); ++k) {
    r.trajectory.segments[0].states(0, k) = col.center.x() + depth;
    r.trajectory.segments[0].states(1, k) = col.center.y();
  }
  const metrics::EvaluationRow row =
      metrics::evaluate(r, scenario, kParams, kWeights);
  CHECK(row.obstacle_violation > 0.0);
  CHECK(row.obstacle_violation <= row.sum_violation);
}

TEST_CASE("criterion matches the transcription objective on the same mesh") {
  const Scenario scenario = env::make_two_obstacle_scenario();
  const Mesh mesh = Mesh::single_segment(9);
  const nlp::NlpProblem p = nlp::build_nlp(scenario, kParams, mesh, kWeights);
  const InitialGuess g = guess::build_simple(scenario, kParams, mesh);
  const Eigen::VectorXd z = nlp::to_decision_vector(g, p.layout);

  refine::PlanResult r;
  r.iterations = 1;
  r.trajectory = nlp::extract_trajectory(z, mesh, p.layout);
  const metrics::EvaluationRow row =
      metrics::evaluate(r, scenario, kParams, kWeights);
  CHECK(row.criterion ==
        doctest::Approx(p.objective(z)).epsilon(1e-6));
}

TEST_CASE("table rendering") {
  CHECK_THROWS_AS(metrics::render_table({}), std::invalid_argument);

  // Single row carries both markers in every column.
  const std::string single = metrics::render_table({sample_row(1.0, 2.0)});
  CHECK(single.find("<best>") != std::string::npos);

  // Two rows: column-wise best/worst, ties to the earlier row.
  std::vector<metrics::EvaluationRow> rows{sample_row(1.0, 9.0),
                                           sample_row(2.0, 3.0)};
  const std::string two = metrics::render_table(rows);
  std::istringstream lines(two);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first.find("1.0000e+00<best>") != std::string::npos);
  CHECK(first.find("9.0000e+00<worst>") != std::string::npos);
  CHECK(second.find("2.0000e+00<worst>") != std::string::npos);
  CHECK(second.find("3.0000e+00<best>") != std::string::npos);

  std::vector<metrics::EvaluationRow> tied{sample_row(5.0, 1.0),
                                           sample_row(5.0, 1.0)};
  const std::string tie = metrics::render_table(tied);
  std::istringstream tl(tie);
  std::getline(tl, header);
  std::getline(tl, first);
  std::getline(tl, second);
  CHECK(first.find("<best>") != std::string::npos);
  CHECK(second.find("<best>") == std::string::npos);

  // Determinism.
  CHECK(metrics::render_table(rows) == metrics::render_table(rows));

  // Percentile markers only appear with enough rows.
  std::vector<metrics::EvaluationRow> many;
  for (int i = 0; i < 12; ++i) {
    many.push_back(sample_row(10.0 + i, 100.0 - i));
  }
  const std::string big = metrics::render_table(many);
  CHECK(big.find("<p10>") != std::string::npos);
  CHECK(big.find("<p90>") != std::string::npos);
  const std::string few = metrics::render_table(
      std::vector<metrics::EvaluationRow>(many.begin(), many.begin() + 5));
  CHECK(few.find("<p10>") == std::string::npos);

  // CSV has a header and one line per row, no markers.
  const std::string csv = metrics::render_csv(rows);
  CHECK(csv.find("<best>") == std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
