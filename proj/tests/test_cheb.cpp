#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uavtraj/cheb.hpp"

using namespace uavtraj;

namespace {

// Oracle: exact integral over [-1, 1] of the j-th Lagrange basis polynomial
// on the given nodes, via monomial expansion. Adequate up to moderate N.
double lagrange_basis_integral(const Eigen::VectorXd& points, int j) {
  const int m = static_cast<int>(points.size());
  std::vector<double> coeff{1.0};  // polynomial coefficients, low order first
  double denom = 1.0;
  for (int k = 0; k < m; ++k) {
    if (k == j) continue;
    std::vector<double> next(coeff.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      next[i + 1] += coeff[i];
      next[i] -= points[k] * coeff[i];
    }
    coeff = next;
    denom *= points[j] - points[k];
  }
  double integral = 0.0;
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    if (i % 2 == 0) integral += 2.0 * coeff[i] / (i + 1.0);
  }
  return integral / denom;
}

}  // namespace

TEST_CASE("cgl points basics") {
  CHECK_THROWS_AS(cheb::cgl_points(0), std::invalid_argument);

  const auto p1 = cheb::cgl_points(1);
  CHECK(p1[0] == -1.0);
  CHECK(p1[1] == 1.0);

  const auto p2 = cheb::cgl_points(2);
  CHECK(p2[0] == -1.0);
  CHECK(p2[1] == 0.0);
  CHECK(p2[2] == 1.0);

  const auto p4 = cheb::cgl_points(4);
  CHECK(p4[1] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-15));
  CHECK(p4[3] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  for (int n : {1, 2, 5, 16, 33}) {
    const auto p = cheb::cgl_points(n);
    CHECK(p[0] == -1.0);
    CHECK(p[n] == 1.0);
    for (int k = 1; k <= n; ++k) CHECK(p[k] > p[k - 1]);
    for (int k = 0; k <= n; ++k) {
      CHECK(p[k] == doctest::Approx(std::cos((n - k) * M_PI / n))
                        .epsilon(1e-14));
    }
  }
}

TEST_CASE("clenshaw-curtis weights against the basis-integral oracle") {
  CHECK_THROWS_AS(cheb::cc_weights(0), std::invalid_argument);

  const auto w1 = cheb::cc_weights(1);
  const auto p1 = cheb::cgl_points(1);
  CHECK(w1[0] == doctest::Approx(lagrange_basis_integral(p1, 0)).epsilon(1e-14));
  CHECK(w1[0] == doctest::Approx(1.0));
  CHECK(w1[1] == doctest::Approx(1.0));

  const auto w2 = cheb::cc_weights(2);
  const auto p2 = cheb::cgl_points(2);
  for (int j = 0; j <= 2; ++j) {
    CHECK(w2[j] ==
          doctest::Approx(lagrange_basis_integral(p2, j)).epsilon(1e-14));
  }
  CHECK(w2[0] == doctest::Approx(1.0 / 3.0));
  CHECK(w2[1] == doctest::Approx(4.0 / 3.0));

  for (int n = 1; n <= 64; ++n) {
    const auto w = cheb::cc_weights(n);
    CHECK(std::abs(w.sum() - 2.0) <= 1e-12);
    CHECK(w.minCoeff() >= 0.0);
  }

  // Exact for monomials of degree <= N.
  for (int n : {3, 8, 13}) {
    const auto p = cheb::cgl_points(n);
    const auto w = cheb::cc_weights(n);
    for (int j = 0; j <= n; ++j) {
      double sum = 0.0;
      for (int k = 0; k <= n; ++k) sum += w[k] * std::pow(p[k], j);
      const double exact = (j % 2 == 0) ? 2.0 / (j + 1.0) : 0.0;
      CHECK(sum == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("differentiation matrix") {
  Eigen::VectorXd pts(2);
  pts << -1.0, 1.0;
  const Eigen::MatrixXd d1 = cheb::diff_matrix(pts);
  CHECK(d1(0, 0) == doctest::Approx(-0.5));
  CHECK(d1(0, 1) == doctest::Approx(0.5));
  CHECK(d1(1, 0) == doctest::Approx(-0.5));
  CHECK(d1(1, 1) == doctest::Approx(0.5));

  Eigen::VectorXd repeated(3);
  repeated << -1.0, 0.0, 0.0;
  CHECK_THROWS_AS(cheb::diff_matrix(repeated), std::invalid_argument);

  const auto grid2 = cheb::make_grid(2);
  Eigen::VectorXd sq(3);
  for (int k = 0; k < 3; ++k) sq[k] = grid2.points[k] * grid2.points[k];
  const Eigen::VectorXd dsq = grid2.diff_matrix * sq;
  CHECK(dsq[0] == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(dsq[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(dsq[2] == doctest::Approx(2.0).epsilon(1e-13));

  // Rows sum to zero and monomials differentiate exactly.
  for (int n : {4, 16, 40}) {
    const auto grid = cheb::make_grid(n);
    for (int i = 0; i <= n; ++i) {
      CHECK(std::abs(grid.diff_matrix.row(i).sum()) <= 1e-10);
    }
    for (int j = 1; j <= n; ++j) {
      Eigen::VectorXd f(n + 1), expected(n + 1);
      for (int k = 0; k <= n; ++k) {
        f[k] = std::pow(grid.points[k], j);
        expected[k] = j * std::pow(grid.points[k], j - 1);
      }
      const Eigen::VectorXd got = grid.diff_matrix * f;
      for (int k = 0; k <= n; ++k) {
        CHECK(std::abs(got[k] - expected[k]) <= 1e-9);
      }
    }
  }

  // d/dt of samples of sin matches cos at the nodes.
  const auto g20 = cheb::make_grid(20);
  Eigen::VectorXd s(21);
  for (int k = 0; k <= 20; ++k) s[k] = std::sin(g20.points[k]);
  const Eigen::VectorXd ds = g20.diff_matrix * s;
  for (int k = 0; k <= 20; ++k) {
    CHECK(std::abs(ds[k] - std::cos(g20.points[k])) <= 1e-10);
  }
}

TEST_CASE("grid scaling") {
  const auto grid = cheb::make_grid(2);
  CHECK_THROWS_AS(cheb::scale_grid(grid, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cheb::scale_grid(grid, 2.0, 1.0), std::invalid_argument);

  const auto ident = cheb::scale_grid(grid, -1.0, 1.0);
  CHECK(ident.times.isApprox(grid.points));
  CHECK(ident.scaled_weights.isApprox(grid.weights));
  CHECK(ident.scaled_diff.isApprox(grid.diff_matrix));

  const auto s02 = cheb::scale_grid(grid, 0.0, 2.0);
  CHECK(s02.times[0] == 0.0);
  CHECK(s02.times[1] == doctest::Approx(1.0));
  CHECK(s02.times[2] == 2.0);
  CHECK(s02.scaled_weights[0] == doctest::Approx(1.0 / 3.0));
  CHECK(s02.scaled_weights[1] == doctest::Approx(4.0 / 3.0));
  CHECK(s02.scaled_diff.isApprox(grid.diff_matrix));

  const auto s04 = cheb::scale_grid(grid, 0.0, 4.0);
  CHECK(std::abs(s04.scaled_weights.sum() - 4.0) <= 1e-12);
}

TEST_CASE("interpolation") {
  const auto grid = cheb::scale_grid(cheb::make_grid(3), 0.0, 1.0);
  Eigen::VectorXd cubic(4);
  for (int k = 0; k < 4; ++k) {
    cubic[k] = std::pow(grid.times[k], 3);
  }
  CHECK(cheb::interpolate(cubic, grid, 0.5) ==
        doctest::Approx(0.125).epsilon(1e-13));
  for (int k = 0; k < 4; ++k) {
    CHECK(cheb::interpolate(cubic, grid, grid.times[k]) == cubic[k]);
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  CHECK(cheb::interpolate(ones, grid, 0.3) == doctest::Approx(1.0));

  CHECK_THROWS_AS(cheb::interpolate(cubic, grid, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(cheb::interpolate(cubic, grid, 1.1), std::invalid_argument);
  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(cheb::interpolate(wrong, grid, 0.5), std::invalid_argument);

  // Linearity in the sample values.
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd f(4), g(4);
  for (int k = 0; k < 4; ++k) {
    f[k] = uni(rng);
    g[k] = uni(rng);
  }
  const double a = 0.7, b = -1.3, t = 0.37;
  CHECK(cheb::interpolate(a * f + b * g, grid, t) ==
        doctest::Approx(a * cheb::interpolate(f, grid, t) +
                        b * cheb::interpolate(g, grid, t))
            .epsilon(1e-12));
}

TEST_CASE("quadrature") {
  const auto g02 = cheb::scale_grid(cheb::make_grid(2), 0.0, 2.0);
  CHECK(cheb::quadrature(Eigen::VectorXd::Ones(3), g02) ==
        doctest::Approx(2.0).epsilon(1e-14));

  const auto g16 = cheb::scale_grid(cheb::make_grid(16), -1.0, 1.0);
  Eigen::VectorXd et(17);
  for (int k = 0; k <= 16; ++k) et[k] = std::exp(g16.times[k]);
  const double exact = std::exp(1.0) - std::exp(-1.0);
  CHECK(std::abs(cheb::quadrature(et, g16) - exact) <= 1e-12);

  const auto g2 = cheb::scale_grid(cheb::make_grid(2), -1.0, 1.0);
  Eigen::VectorXd tsq(3);
  for (int k = 0; k < 3; ++k) tsq[k] = g2.times[k] * g2.times[k];
  CHECK(cheb::quadrature(tsq, g2) == doctest::Approx(2.0 / 3.0));

  Eigen::VectorXd wrong(5);
  CHECK_THROWS_AS(cheb::quadrature(wrong, g2), std::invalid_argument);

  // Spectral convergence: error drops by >= 4 orders from N=4 to N=16.
  const auto g4 = cheb::scale_grid(cheb::make_grid(4), -1.0, 1.0);
  Eigen::VectorXd et4(5);
  for (int k = 0; k <= 4; ++k) et4[k] = std::exp(g4.times[k]);
  const double err4 = std::abs(cheb::quadrature(et4, g4) - exact);
  const double err16 = std::abs(cheb::quadrature(et, g16) - exact);
  CHECK(err4 / std::max(err16, 1e-300) >= 1e4);

  // scale_grid then quadrature of 1 returns the interval length.
  for (double tf : {0.5, 2.0, 17.0}) {
    const auto g = cheb::scale_grid(cheb::make_grid(9), 0.0, tf);
    CHECK(std::abs(cheb::quadrature(Eigen::VectorXd::Ones(10), g) - tf) <=
          1e-12);
  }
}

TEST_CASE("degree cap") {
  CHECK_THROWS_AS(cheb::cgl_points(257), std::invalid_argument);
  CHECK_NOTHROW(cheb::make_grid(256));
}
