#include "uavtraj/cheb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavtraj::cheb {

namespace {
constexpr double kPi = std::numbers::pi;

void check_degree(int degree) {
  if (degree < 1) {
    throw std::invalid_argument("collocation degree must be >= 1");
  }
  if (degree > kMaxDegree) {
    throw std::invalid_argument("collocation degree exceeds cap");
  }
}
}  // namespace

Eigen::VectorXd cgl_points(int degree) {
  check_degree(degree);
  const int n = degree;
  Eigen::VectorXd x(n + 1);
  // sin form keeps the grid exactly symmetric about 0.
  for (int k = 0; k <= n; ++k) {
    x[k] = std::sin(kPi * (2 * k - n) / (2.0 * n));
  }
  x[0] = -1.0;
  x[n] = 1.0;
  return x;
}

Eigen::VectorXd cc_weights(int degree) {
  check_degree(degree);
  const int n = degree;
  Eigen::VectorXd w(n + 1);
  if (n % 2 == 0) {
    const double end = 1.0 / (static_cast<double>(n) * n - 1.0);
    w[0] = end;
    w[n] = end;
    for (int k = 1; k < n; ++k) {
      const double theta = kPi * k / n;
      double v = 1.0;
      for (int j = 1; j <= n / 2 - 1; ++j) {
        v -= 2.0 * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
      }
      v -= std::cos(n * theta) / (static_cast<double>(n) * n - 1.0);
      w[k] = 2.0 * v / n;
    }
  } else {
    const double end = 1.0 / (static_cast<double>(n) * n);
    w[0] = end;
    w[n] = end;
    for (int k = 1; k < n; ++k) {
      const double theta = kPi * k / n;
      double v = 1.0;
      for (int j = 1; j <= (n - 1) / 2; ++j) {
        v -= 2.0 * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
      }
      w[k] = 2.0 * v / n;
    }
  }
  return w;
}

Eigen::VectorXd cgl_barycentric_weights(int degree) {
  check_degree(degree);
  const int n = degree;
  Eigen::VectorXd lambda(n + 1);
  for (int k = 0; k <= n; ++k) {
    double v = (k % 2 == 0) ? 1.0 : -1.0;
    if (k == 0 || k == n) v *= 0.5;
    lambda[k] = v;
  }
  return lambda;
}

namespace {

Eigen::MatrixXd diff_from_barycentric(const Eigen::VectorXd& points,
                                      const Eigen::VectorXd& lambda) {
  const int m = static_cast<int>(points.size());
  Eigen::MatrixXd d(m, m);
  for (int i = 0; i < m; ++i) {
    double diag = 0.0;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      d(i, j) = (lambda[j] / lambda[i]) / (points[i] - points[j]);
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

}  // namespace

Eigen::MatrixXd diff_matrix(const Eigen::VectorXd& points) {
  const int m = static_cast<int>(points.size());
  if (m < 2) {
    throw std::invalid_argument("diff_matrix needs at least two points");
  }
  for (int i = 1; i < m; ++i) {
    if (!(points[i] > points[i - 1])) {
      throw std::invalid_argument("points must be distinct and ascending");
    }
  }
  // Generic barycentric weights, rescaled so products stay representable.
  const double scale = 4.0 / (points[m - 1] - points[0]);
  Eigen::VectorXd lambda(m);
  for (int j = 0; j < m; ++j) {
    double prod = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k == j) continue;
      prod *= (points[j] - points[k]) * scale;
    }
    lambda[j] = 1.0 / prod;
  }
  return diff_from_barycentric(points, lambda);
}

CollocationGrid make_grid(int degree) {
  CollocationGrid grid;
  grid.degree = degree;
  grid.points = cgl_points(degree);
  grid.weights = cc_weights(degree);
  grid.bary_weights = cgl_barycentric_weights(degree);
  grid.diff_matrix = diff_from_barycentric(grid.points, grid.bary_weights);
  return grid;
}

ScaledGrid scale_grid(const CollocationGrid& grid, double t0, double tf) {
  if (!(tf > t0)) {
    throw std::invalid_argument("scale_grid requires tf > t0");
  }
  ScaledGrid s;
  s.base = grid;
  s.t0 = t0;
  s.tf = tf;
  const double half = 0.5 * (tf - t0);
  const int n = grid.degree;
  s.times.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    s.times[k] = t0 + (grid.points[k] + 1.0) * half;
  }
  s.times[0] = t0;
  s.times[n] = tf;
  s.scaled_weights = grid.weights * half;
  s.scaled_diff = grid.diff_matrix / half;
  return s;
}

Eigen::VectorXd interpolation_coefficients(const ScaledGrid& grid, double t) {
  if (t < grid.t0 || t > grid.tf) {
    throw std::invalid_argument("interpolation time outside [t0, tf]");
  }
  const int m = static_cast<int>(grid.times.size());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    if (t == grid.times[j]) {
      c[j] = 1.0;
      return c;
    }
  }
  double denom = 0.0;
  for (int j = 0; j < m; ++j) {
    c[j] = grid.base.bary_weights[j] / (t - grid.times[j]);
    denom += c[j];
  }
  c /= denom;
  return c;
}

double interpolate(const Eigen::VectorXd& values, const ScaledGrid& grid,
                   double t) {
  if (values.size() != grid.times.size()) {
    throw std::invalid_argument("interpolate: values length mismatch");
  }
  return interpolation_coefficients(grid, t).dot(values);
}

double quadrature(const Eigen::VectorXd& values, const ScaledGrid& grid) {
  if (values.size() != grid.scaled_weights.size()) {
    throw std::invalid_argument("quadrature: values length mismatch");
  }
  return grid.scaled_weights.dot(values);
}

}  // namespace uavtraj::cheb
