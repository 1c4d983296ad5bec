#pragma once

#include <Eigen/Core>

namespace uavtraj::cheb {

// Per-segment degrees above this must be handled by splitting, not by
// raising the degree further; conditioning of D degrades beyond it.
inline constexpr int kMaxDegree = 256;

/// Chebyshev-Gauss-Lobatto collocation grid on [-1, 1]: nodes in ascending
/// order, Clenshaw-Curtis quadrature weights, and the differentiation matrix
/// that maps node samples to derivative samples of the interpolant.
struct CollocationGrid {
  int degree = 0;               // N; the grid has N+1 points
  Eigen::VectorXd points;       // ascending; points[0] = -1, points[N] = +1
  Eigen::VectorXd weights;      // Clenshaw-Curtis; sums to 2
  Eigen::VectorXd bary_weights; // barycentric weights (half at endpoints)
  Eigen::MatrixXd diff_matrix;  // (N+1) x (N+1)
};

/// A CollocationGrid affinely mapped onto [t0, tf] (seconds).
struct ScaledGrid {
  CollocationGrid base;
  double t0 = -1.0;
  double tf = 1.0;
  Eigen::VectorXd times;          // node times in [t0, tf], ascending
  Eigen::VectorXd scaled_weights; // weights * (tf - t0) / 2
  Eigen::MatrixXd scaled_diff;    // diff_matrix * 2 / (tf - t0)
};

/// Ascending CGL points cos((N-k)*pi/N), k = 0..N. Throws for N < 1.
Eigen::VectorXd cgl_points(int degree);

/// Clenshaw-Curtis weights for the CGL grid; exact for polynomials of
/// degree <= N on [-1, 1]. Throws for N < 1.
Eigen::VectorXd cc_weights(int degree);

/// Closed-form barycentric weights for the ascending CGL grid.
Eigen::VectorXd cgl_barycentric_weights(int degree);

/// Differentiation matrix for arbitrary distinct ascending points,
/// built from barycentric weights with the negative-sum diagonal.
Eigen::MatrixXd diff_matrix(const Eigen::VectorXd& points);

/// Assemble the full grid for a given degree.
CollocationGrid make_grid(int degree);

/// Map a grid onto [t0, tf]. Throws if tf <= t0.
ScaledGrid scale_grid(const CollocationGrid& grid, double t0, double tf);

/// Lagrange basis values at time t, i.e. coefficients c with
/// p(t) = sum_k c[k] * values[k]. Exact unit vector on a node hit.
/// Throws if t lies outside [t0, tf].
Eigen::VectorXd interpolation_coefficients(const ScaledGrid& grid, double t);

/// Barycentric evaluation of the interpolant through (times, values) at t.
double interpolate(const Eigen::VectorXd& values, const ScaledGrid& grid,
                   double t);

/// Clenshaw-Curtis approximation of the integral of the sampled function
/// over [t0, tf].
double quadrature(const Eigen::VectorXd& values, const ScaledGrid& grid);

}  // namespace uavtraj::cheb
