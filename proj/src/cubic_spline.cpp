#include "uavtraj/cubic_spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavtraj {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values,
                         double start_slope, double end_slope)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values_.size() != n) {
    throw std::invalid_argument("spline needs >= 2 knots with matching values");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knots_[i] > knots_[i - 1])) {
      throw std::invalid_argument("spline knots must be strictly increasing");
    }
  }

  // Tridiagonal system for the knot second derivatives, clamped ends.
  std::vector<double> diag(n), upper(n), lower(n), rhs(n);
  const double h0 = knots_[1] - knots_[0];
  diag[0] = 2.0 * h0;
  upper[0] = h0;
  rhs[0] = 6.0 * ((values_[1] - values_[0]) / h0 - start_slope);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hp = knots_[i] - knots_[i - 1];
    const double hn = knots_[i + 1] - knots_[i];
    lower[i] = hp;
    diag[i] = 2.0 * (hp + hn);
    upper[i] = hn;
    rhs[i] = 6.0 * ((values_[i + 1] - values_[i]) / hn -
                    (values_[i] - values_[i - 1]) / hp);
  }
  const double hn = knots_[n - 1] - knots_[n - 2];
  lower[n - 1] = hn;
  diag[n - 1] = 2.0 * hn;
  rhs[n - 1] =
      6.0 * (end_slope - (values_[n - 1] - values_[n - 2]) / hn);

  // Thomas algorithm.
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  second_.assign(n, 0.0);
  second_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
  }
}

int CubicSpline::interval_of(double t) const {
  if (t < knots_.front() || t > knots_.back()) {
    throw std::invalid_argument("spline evaluated outside its knot range");
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  int i = static_cast<int>(it - knots_.begin()) - 1;
  return std::min(i, static_cast<int>(knots_.size()) - 2);
}

double CubicSpline::value(double t) const {
  const int i = interval_of(t);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  return a * values_[i] + b * values_[i + 1] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) *
             (h * h) / 6.0;
}

double CubicSpline::derivative(double t) const {
  const int i = interval_of(t);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  return (values_[i + 1] - values_[i]) / h +
         ((3.0 * b * b - 1.0) * second_[i + 1] -
          (3.0 * a * a - 1.0) * second_[i]) *
             h / 6.0;
}

double CubicSpline::second_derivative(double t) const {
  const int i = interval_of(t);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  return a * second_[i] + b * second_[i + 1];
}

}  // namespace uavtraj
