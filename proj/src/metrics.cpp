#include "uavtraj/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "uavtraj/cheb.hpp"
#include "uavtraj/limits.hpp"

namespace uavtraj::metrics {

EvaluationRow evaluate(const refine::PlanResult& result,
                       const Scenario& scenario, const UavParams& params,
                       const nlp::Weights& weights) {
  EvaluationRow row;
  row.level = result.level;
  row.constrained = result.constrained;
  row.method = result.method;
  row.iterations = result.iterations;
  row.absolute_error = result.final_report.abs_max;
  row.total_time = result.total_wall_time;

  const BoundaryConditions bc =
      BoundaryConditions::hover_to_hover(scenario, params);
  const Trajectory& traj = result.trajectory;
  if (traj.segments.empty()) return row;

  for (const auto& seg : traj.segments) {
    Eigen::VectorXd values(seg.grid.times.size());
    for (int k = 0; k < seg.grid.times.size(); ++k) {
      values[k] = nlp::criterion_integrand(
          unpack_state(seg.states.col(k)), unpack_control(seg.controls.col(k)),
          bc.final_state, bc.final_control, weights);
    }
    row.criterion += cheb::quadrature(values, seg.grid);
  }

  const BoxLimits limits = BoxLimits::for_scenario(scenario);
  const StateVec slo = limits.state_lower();
  const StateVec shi = limits.state_upper();
  const ControlVec clo = limits.control_lower();
  const ControlVec chi = limits.control_upper();
  const double r_safe = env::safety_radius(params);

  constexpr int kSamples = 1000;
  for (int j = 0; j < kSamples; ++j) {
    const double t =
        traj.t0 + (traj.tf - traj.t0) * j / static_cast<double>(kSamples - 1);
    const StateVec x = traj.state(t);
    const ControlVec u = traj.control(t);
    for (int c = 0; c < 13; ++c) {
      if (std::isfinite(slo[c])) {
        row.sum_violation += std::max(0.0, slo[c] - x[c]);
      }
      if (std::isfinite(shi[c])) {
        row.sum_violation += std::max(0.0, x[c] - shi[c]);
      }
    }
    for (int c = 0; c < 4; ++c) {
      row.sum_violation += std::max(0.0, clo[c] - u[c]);
      row.sum_violation += std::max(0.0, u[c] - chi[c]);
    }
    row.sum_violation += std::abs(x.segment<4>(6).squaredNorm() - 1.0);
    const Eigen::Vector3d pos = x.segment<3>(0);
    for (const Column& col : scenario.columns) {
      const double margin = env::obstacle_margin(pos, col, r_safe);
      if (margin < 0.0) {
        row.sum_violation += -margin;
        row.obstacle_violation += -margin;
      }
    }
  }
  return row;
}

namespace {

struct ColumnDef {
  const char* name;
  double (*get)(const EvaluationRow&);
};

const ColumnDef kNumericColumns[] = {
    {"iter", [](const EvaluationRow& r) { return static_cast<double>(r.iterations); }},
    {"criterion", [](const EvaluationRow& r) { return r.criterion; }},
    {"abs_error", [](const EvaluationRow& r) { return r.absolute_error; }},
    {"sum_viol", [](const EvaluationRow& r) { return r.sum_violation; }},
    {"obst_viol", [](const EvaluationRow& r) { return r.obstacle_violation; }},
    {"time_s", [](const EvaluationRow& r) { return r.total_time; }},
};

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

// Nearest-rank percentile of a sorted copy.
double percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  const int rank = std::max(
      1, static_cast<int>(std::ceil(p * static_cast<double>(n))));
  return values[rank - 1];
}

}  // namespace

std::string render_table(const std::vector<EvaluationRow>& rows,
                         int percentile_min_rows) {
  if (rows.empty()) {
    throw std::invalid_argument("render_table needs at least one row");
  }
  const int ncols = static_cast<int>(std::size(kNumericColumns));
  const int nrows = static_cast<int>(rows.size());
  const bool with_percentiles = nrows >= percentile_min_rows;

  // Column-wise extremes; lower is better everywhere.
  std::vector<int> best(ncols, 0), worst(ncols, 0);
  std::vector<double> p10(ncols), p90(ncols);
  for (int c = 0; c < ncols; ++c) {
    std::vector<double> values(nrows);
    for (int r = 0; r < nrows; ++r) values[r] = kNumericColumns[c].get(rows[r]);
    for (int r = 1; r < nrows; ++r) {
      if (values[r] < values[best[c]]) best[c] = r;
      if (values[r] > values[worst[c]]) worst[c] = r;
    }
    if (with_percentiles) {
      p10[c] = percentile(values, 0.10);
      p90[c] = percentile(values, 0.90);
    }
  }

  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-22s %-7s %-5s", "level", "constr",
                "method");
  os << line;
  for (int c = 0; c < ncols; ++c) {
    std::snprintf(line, sizeof(line), " %-18s", kNumericColumns[c].name);
    os << line;
  }
  os << '\n';

  for (int r = 0; r < nrows; ++r) {
    std::snprintf(line, sizeof(line), "%-22s %-7s %-5s",
                  to_string(rows[r].level),
                  rows[r].constrained ? "yes" : "no",
                  to_string(rows[r].method));
    os << line;
    for (int c = 0; c < ncols; ++c) {
      const double v = kNumericColumns[c].get(rows[r]);
      std::string cell = format_value(v);
      if (r == best[c]) {
        cell += "<best>";
      } else if (r == worst[c]) {
        cell += "<worst>";
      } else if (with_percentiles && v <= p10[c]) {
        cell += "<p10>";
      } else if (with_percentiles && v >= p90[c]) {
        cell += "<p90>";
      }
      std::snprintf(line, sizeof(line), " %-18s", cell.c_str());
      os << line;
    }
    os << '\n';
  }
  return os.str();
}

std::string render_csv(const std::vector<EvaluationRow>& rows) {
  std::ostringstream os;
  os << "level,constrained,method,iterations,criterion,absolute_error,"
        "sum_violation,obstacle_violation,total_time\n";
  char buf[64];
  for (const EvaluationRow& r : rows) {
    os << to_string(r.level) << ',' << (r.constrained ? "yes" : "no") << ','
       << to_string(r.method) << ',' << r.iterations;
    const double values[] = {r.criterion, r.absolute_error, r.sum_violation,
                             r.obstacle_violation, r.total_time};
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace uavtraj::metrics
