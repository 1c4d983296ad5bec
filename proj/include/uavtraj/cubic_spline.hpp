#pragma once

#include <vector>

namespace uavtraj {

/// Clamped cubic spline: interpolates (knots, values) with prescribed end
/// slopes. Knots must be strictly increasing; evaluation outside the knot
/// range is rejected.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> knots, std::vector<double> values,
              double start_slope, double end_slope);

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

  double t_front() const { return knots_.front(); }
  double t_back() const { return knots_.back(); }

 private:
  int interval_of(double t) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivative at each knot
};

}  // namespace uavtraj
