#pragma once

#include <string>
#include <vector>

#include "uavtraj/refine.hpp"

namespace uavtraj::metrics {

/// One evaluation-table row for a finished plan.
struct EvaluationRow {
  GuessLevel level = GuessLevel::kSimple;
  bool constrained = false;
  refine::Method method = refine::Method::kPsm;
  int iterations = 0;
  double criterion = 0.0;
  double absolute_error = 0.0;
  double sum_violation = 0.0;
  double obstacle_violation = 0.0;
  double total_time = 0.0;
};

/// Criterion by Clenshaw-Curtis quadrature along the final trajectory,
/// plus violation sums over 1000 uniform samples (boxes, quaternion norm,
/// obstacles). Pure function of its inputs.
EvaluationRow evaluate(const refine::PlanResult& result,
                       const Scenario& scenario, const UavParams& params,
                       const nlp::Weights& weights);

/// Aligned text table with best/worst markers per numeric column and
/// 90th/10th percentile markers once at least `percentile_min_rows` rows
/// are present. Ties resolve to the earlier row.
std::string render_table(const std::vector<EvaluationRow>& rows,
                         int percentile_min_rows = 10);

/// Same rows as machine-readable CSV (values only, no markers).
std::string render_csv(const std::vector<EvaluationRow>& rows);

}  // namespace uavtraj::metrics
