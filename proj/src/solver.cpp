#include "uavtraj/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

namespace uavtraj::solver {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kIterationLimit: return "iteration_limit";
    case SolveStatus::kTimeLimit: return "time_limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct LbfgsMemory {
  std::deque<Eigen::VectorXd> s;
  std::deque<Eigen::VectorXd> y;
  std::deque<double> rho;
  int capacity = 10;

  void push(const Eigen::VectorXd& si, const Eigen::VectorXd& yi) {
    const double sy = si.dot(yi);
    if (!(sy > 1e-12 * si.norm() * yi.norm())) return;
    s.push_back(si);
    y.push_back(yi);
    rho.push_back(1.0 / sy);
    if (static_cast<int>(s.size()) > capacity) {
      s.pop_front();
      y.pop_front();
      rho.pop_front();
    }
  }

  void clear() {
    s.clear();
    y.clear();
    rho.clear();
  }

  // Two-loop recursion, d = -H g.
  Eigen::VectorXd direction(const Eigen::VectorXd& g) const {
    Eigen::VectorXd q = -g;
    const int m = static_cast<int>(s.size());
    if (m == 0) return q;
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * s[i].dot(q);
      q -= alpha[i] * y[i];
    }
    const double gamma = s.back().dot(y.back()) / y.back().squaredNorm();
    q *= gamma;
    for (int i = 0; i < m; ++i) {
      const double beta = rho[i] * y[i].dot(q);
      q += (alpha[i] - beta) * s[i];
    }
    return q;
  }
};

struct InnerResult {
  double value = 0.0;
  double projected_gradient_norm = kInf;
  int iterations = 0;
  bool converged = false;
  bool hit_deadline = false;
};

// Bound-constrained minimization of the augmented Lagrangian by damped
// Gauss-Newton steps on its natural least-squares structure. Variables at a
// bound with an outward-pushing gradient are frozen out of each step; the
// step is safeguarded by Levenberg damping and an Armijo search along the
// projection arc.
class GaussNewtonInner {
 public:
  GaussNewtonInner(const nlp::NlpProblem& problem, const Eigen::VectorXd& sigma,
                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper)
      : problem_(problem), sigma_(sigma), lower_(lower), upper_(upper) {}

  /// Minimizes s_obj * f + lambda'h + (rho/2)|h|^2 + PHR(g) over the box.
  /// s_obj = 0 with zero multipliers and rho = 1 is plain feasibility
  /// restoration on the constraint residuals.
  template <typename ValueFn>
  InnerResult minimize(ValueFn&& la_value, double s_obj,
                       const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu,
                       double rho, Eigen::VectorXd& y, double tol,
                       int max_iter, Clock::time_point start,
                       double deadline) {
    InnerResult res;
    const int n = problem_.dimension;
    const int me = problem_.num_equalities;
    const int mi = problem_.num_inequalities;

    y = y.cwiseMax(lower_).cwiseMin(upper_);
    double value = la_value(y);
    if (!std::isfinite(value)) return res;

    Eigen::VectorXd h(me), g_in(mi), grad_z(n), grad(n), curv(n);
    Eigen::MatrixXd je, ji, hess(n, n);
    double nu = 1e-8;

    for (int it = 0; it < max_iter; ++it) {
      res.iterations = it + 1;
      const Eigen::VectorXd z = y.cwiseProduct(sigma_);
      if (me > 0) problem_.equality_constraints(z, h);
      if (mi > 0) problem_.inequality_constraints(z, g_in);
      Eigen::VectorXd we = lambda + rho * h;
      Eigen::VectorXd wi(mi);
      for (int i = 0; i < mi; ++i) wi[i] = std::max(0.0, mu[i] + rho * g_in[i]);
      problem_.weighted_gradient(z, s_obj, we, wi, grad_z);
      grad = grad_z.cwiseProduct(sigma_);

      const Eigen::VectorXd pg =
          y - (y - grad).cwiseMax(lower_).cwiseMin(upper_);
      res.projected_gradient_norm = pg.lpNorm<Eigen::Infinity>();
      res.value = value;
      if (res.projected_gradient_norm <= tol) {
        res.converged = true;
        return res;
      }
      if (seconds_since(start) > deadline) {
        res.hit_deadline = true;
        return res;
      }

      // Gauss-Newton model in the scaled coordinates.
      hess.setZero();
      if (s_obj != 0.0) {
        problem_.objective_curvature(z, curv);
        hess.diagonal() =
            s_obj * curv.cwiseProduct(sigma_.cwiseProduct(sigma_));
      }
      if (me > 0) {
        problem_.equality_jacobian(z, je);
        je = je * sigma_.asDiagonal();
        hess.selfadjointView<Eigen::Lower>().rankUpdate(je.transpose(), rho);
      }
      if (mi > 0) {
        problem_.inequality_jacobian(z, ji);
        ji = ji * sigma_.asDiagonal();
        for (int i = 0; i < mi; ++i) {
          if (mu[i] + rho * g_in[i] > 0.0) {
            hess.selfadjointView<Eigen::Lower>().rankUpdate(
                ji.row(i).transpose(), rho);
          }
        }
      }
      hess = hess.selfadjointView<Eigen::Lower>();

      // Freeze variables pinned by their bounds.
      std::vector<int> free;
      free.reserve(n);
      for (int i = 0; i < n; ++i) {
        const bool at_lower = y[i] <= lower_[i];
        const bool at_upper = y[i] >= upper_[i];
        if ((at_lower && grad[i] > 0.0) || (at_upper && grad[i] < 0.0) ||
            (at_lower && at_upper)) {
          continue;
        }
        free.push_back(i);
      }
      if (free.empty()) {
        res.converged = res.projected_gradient_norm <= tol;
        return res;
      }
      const Eigen::VectorXi fidx =
          Eigen::Map<const Eigen::VectorXi>(free.data(), free.size());
      Eigen::MatrixXd hff = hess(fidx, fidx);
      Eigen::VectorXd gf = grad(fidx);
      const double diag_scale = std::max(1e-8, hff.diagonal().maxCoeff());

      bool progressed = false;
      for (int attempt = 0; attempt < 12 && !progressed; ++attempt) {
        Eigen::MatrixXd damped = hff;
        damped.diagonal().array() += nu * diag_scale;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
        if (ldlt.info() != Eigen::Success) {
          nu = std::max(nu * 10.0, 1e-10);
          continue;
        }
        const Eigen::VectorXd df = ldlt.solve(-gf);
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < free.size(); ++i) d[free[i]] = df[i];
        if (!(d.dot(grad) < 0.0)) {
          nu = std::max(nu * 10.0, 1e-10);
          continue;
        }

        // Keep single steps from teleporting across the box; the scaled
        // coordinates make a unit step a natural trust region.
        const double dmax = d.lpNorm<Eigen::Infinity>();
        double alpha = dmax > 1.0 ? 1.0 / dmax : 1.0;
        for (int ls = 0; ls < 30; ++ls) {
          Eigen::VectorXd yt =
              (y + alpha * d).cwiseMax(lower_).cwiseMin(upper_);
          const Eigen::VectorXd step = yt - y;
          if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
          const double vt = la_value(yt);
          if (std::isfinite(vt) &&
              vt <= value + 1e-4 * std::min(grad.dot(step), 0.0)) {
            y.swap(yt);
            value = vt;
            progressed = true;
            break;
          }
          alpha *= 0.5;
        }
        if (progressed) {
          nu = std::max(nu * 0.25, 1e-12);
        } else {
          nu = std::max(nu * 10.0, 1e-10);
        }
      }
      if (!progressed) {
        res.value = value;
        return res;  // stalled
      }
    }
    res.value = value;
    return res;
  }

  /// One SQP-flavored direction: minimize the diagonal quadratic model of
  /// the Lagrangian subject to J_eq d = -h, bound-frozen variables removed,
  /// solved through the Schur complement. Returns false when no usable
  /// direction exists.
  bool tangential_direction(const Eigen::VectorXd& y,
                            const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& mu, double rho,
                            Eigen::VectorXd& d) const {
    const int n = problem_.dimension;
    const int me = problem_.num_equalities;
    const int mi = problem_.num_inequalities;

    const Eigen::VectorXd z = y.cwiseProduct(sigma_);
    Eigen::VectorXd h(me), g_in(mi);
    if (me > 0) problem_.equality_constraints(z, h);
    if (mi > 0) problem_.inequality_constraints(z, g_in);
    Eigen::VectorXd wi(mi);
    for (int i = 0; i < mi; ++i) wi[i] = std::max(0.0, mu[i] + rho * g_in[i]);
    Eigen::VectorXd grad_z(n);
    problem_.weighted_gradient(z, 1.0, lambda, wi, grad_z);
    const Eigen::VectorXd grad = grad_z.cwiseProduct(sigma_);

    Eigen::VectorXd curv(n);
    problem_.objective_curvature(z, curv);
    Eigen::VectorXd hdiag = curv.cwiseProduct(sigma_.cwiseProduct(sigma_));
    Eigen::MatrixXd je, ji;
    if (me > 0) {
      problem_.equality_jacobian(z, je);
      je = je * sigma_.asDiagonal();
    }
    if (mi > 0) {
      problem_.inequality_jacobian(z, ji);
      ji = ji * sigma_.asDiagonal();
      for (int i = 0; i < mi; ++i) {
        if (wi[i] > 0.0) {
          hdiag += rho * ji.row(i).cwiseAbs2().transpose();
        }
      }
    }

    std::vector<int> free;
    free.reserve(n);
    for (int i = 0; i < n; ++i) {
      const bool at_lower = y[i] <= lower_[i];
      const bool at_upper = y[i] >= upper_[i];
      if ((at_lower && grad[i] > 0.0) || (at_upper && grad[i] < 0.0) ||
          (at_lower && at_upper)) {
        continue;
      }
      free.push_back(i);
    }
    if (free.empty()) return false;
    const Eigen::VectorXi fidx =
        Eigen::Map<const Eigen::VectorXi>(free.data(), free.size());
    const double base = std::max(1e-8, hdiag(fidx).maxCoeff());

    Eigen::VectorXd dinv(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) {
      dinv[i] = 1.0 / (hdiag[free[i]] + 1e-8 * base);
    }
    const Eigen::VectorXd gf = grad(fidx);
    Eigen::VectorXd df;
    if (me > 0) {
      const Eigen::MatrixXd jf = je(Eigen::all, fidx);
      Eigen::MatrixXd schur = jf * dinv.asDiagonal() * jf.transpose();
      schur.diagonal().array() += 1e-10 * (1.0 + schur.diagonal().maxCoeff());
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(schur);
      if (ldlt.info() != Eigen::Success) return false;
      const Eigen::VectorXd mult =
          ldlt.solve(jf * dinv.cwiseProduct(-gf) + h);
      df = dinv.cwiseProduct(-gf - jf.transpose() * mult);
    } else {
      df = dinv.cwiseProduct(-gf);
    }
    d.setZero(n);
    for (std::size_t i = 0; i < free.size(); ++i) d[free[i]] = df[i];
    return d.lpNorm<Eigen::Infinity>() > 0.0;
  }

 private:
  const nlp::NlpProblem& problem_;
  const Eigen::VectorXd& sigma_;
  const Eigen::VectorXd& lower_;
  const Eigen::VectorXd& upper_;
};

// Bound-constrained minimization by projected L-BFGS with an Armijo
// backtracking search along the projection arc. Variables sitting at a
// bound with an outward-pushing gradient are frozen out of the quasi-Newton
// direction.
class InnerSolver {
 public:
  InnerSolver(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper)
      : lower_(lower), upper_(upper) {}

  template <typename ValueFn, typename GradFn>
  InnerResult minimize(ValueFn&& value_fn, GradFn&& grad_fn,
                       Eigen::VectorXd& x, double tol, int max_iter,
                       Clock::time_point start, double deadline) {
    InnerResult res;
    project(x);
    double f = value_fn(x);
    if (!std::isfinite(f)) return res;
    Eigen::VectorXd g(x.size());
    grad_fn(x, g);
    LbfgsMemory memory;
    bool restarted = false;

    for (int it = 0; it < max_iter; ++it) {
      res.iterations = it + 1;
      const Eigen::VectorXd pg = x - projected(x - g);
      res.projected_gradient_norm = pg.lpNorm<Eigen::Infinity>();
      res.value = f;
      if (res.projected_gradient_norm <= tol) {
        res.converged = true;
        return res;
      }
      if (seconds_since(start) > deadline) {
        res.hit_deadline = true;
        return res;
      }

      // Freeze active bounds whose gradient points outward.
      Eigen::VectorXd gm = g;
      for (int i = 0; i < x.size(); ++i) {
        if ((x[i] <= lower_[i] && g[i] > 0.0) ||
            (x[i] >= upper_[i] && g[i] < 0.0)) {
          gm[i] = 0.0;
        }
      }
      Eigen::VectorXd d = memory.direction(gm);
      for (int i = 0; i < x.size(); ++i) {
        if (gm[i] == 0.0 && ((x[i] <= lower_[i]) || (x[i] >= upper_[i]))) {
          d[i] = 0.0;
        }
      }
      if (!(d.dot(g) < 0.0)) {
        d = -gm;
        memory.clear();
      }

      double alpha = 1.0;
      bool accepted = false;
      Eigen::VectorXd xt, step;
      double ft = 0.0;
      for (int ls = 0; ls < 60; ++ls) {
        xt = projected(x + alpha * d);
        step = xt - x;
        if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
        ft = value_fn(xt);
        if (std::isfinite(ft) &&
            ft <= f + 1e-4 * std::min(g.dot(step), 0.0)) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        if (!restarted && !memory.s.empty()) {
          memory.clear();
          restarted = true;
          continue;
        }
        res.value = f;
        return res;  // stalled
      }
      restarted = false;

      Eigen::VectorXd gt(x.size());
      grad_fn(xt, gt);
      memory.push(step, gt - g);
      x = xt;
      f = ft;
      g.swap(gt);
    }
    res.value = f;
    return res;
  }

 private:
  void project(Eigen::VectorXd& x) const {
    x = x.cwiseMax(lower_).cwiseMin(upper_);
  }
  Eigen::VectorXd projected(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lower_).cwiseMin(upper_);
  }

  const Eigen::VectorXd& lower_;
  const Eigen::VectorXd& upper_;
};

}  // namespace

SolveResult solve(const nlp::NlpProblem& problem, const Eigen::VectorXd& guess,
                  const SolveOptions& options) {
  const auto start = Clock::now();
  SolveResult result;
  if (guess.size() != problem.dimension) {
    throw std::invalid_argument("solve: guess dimension mismatch");
  }

  const int n = problem.dimension;
  const int me = problem.num_equalities;
  const int mi = problem.num_inequalities;

  // The inner solvers work in scaled coordinates y = z / sigma.
  Eigen::VectorXd sigma = problem.variable_scales;
  if (sigma.size() != n) sigma = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd lower = problem.lower.cwiseQuotient(sigma);
  const Eigen::VectorXd upper = problem.upper.cwiseQuotient(sigma);

  auto unscale = [&](const Eigen::VectorXd& y) {
    return (y.array() * sigma.array()).matrix();
  };

  Eigen::VectorXd y =
      guess.cwiseQuotient(sigma).cwiseMax(lower).cwiseMin(upper);

  const bool second_order = static_cast<bool>(problem.equality_jacobian) &&
                            static_cast<bool>(problem.inequality_jacobian) &&
                            static_cast<bool>(problem.objective_curvature);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(mi);
  double rho = 10.0;

  Eigen::VectorXd h(me), g_in(mi), grad_z(n);

  auto eval_constraints = [&](const Eigen::VectorXd& z) {
    if (me > 0) problem.equality_constraints(z, h);
    if (mi > 0) problem.inequality_constraints(z, g_in);
  };
  auto violation_of = [&]() {
    double v = 0.0;
    for (int i = 0; i < me; ++i) v = std::max(v, std::abs(h[i]));
    for (int i = 0; i < mi; ++i) v = std::max(v, g_in[i]);
    return v;
  };

  // Augmented Lagrangian value in scaled coordinates.
  auto la_value = [&](const Eigen::VectorXd& yv) {
    const Eigen::VectorXd z = unscale(yv);
    double value = problem.objective(z);
    if (!std::isfinite(value)) return value;
    if (me > 0) {
      Eigen::VectorXd hv(me);
      problem.equality_constraints(z, hv);
      value += lambda.dot(hv) + 0.5 * rho * hv.squaredNorm();
    }
    if (mi > 0) {
      Eigen::VectorXd gv(mi);
      problem.inequality_constraints(z, gv);
      for (int i = 0; i < mi; ++i) {
        const double t = std::max(0.0, mu[i] + rho * gv[i]);
        value += (t * t - mu[i] * mu[i]) / (2.0 * rho);
      }
    }
    return value;
  };
  auto la_gradient = [&](const Eigen::VectorXd& yv, Eigen::VectorXd& out) {
    const Eigen::VectorXd z = unscale(yv);
    eval_constraints(z);
    Eigen::VectorXd we = lambda + rho * h;
    Eigen::VectorXd wi(mi);
    for (int i = 0; i < mi; ++i) {
      wi[i] = std::max(0.0, mu[i] + rho * g_in[i]);
    }
    problem.weighted_gradient(z, 1.0, we, wi, grad_z);
    out = grad_z.cwiseProduct(sigma);
  };

  // Reject a guess whose objective is not finite even after clipping.
  {
    const double f0 = problem.objective(unscale(y));
    if (!std::isfinite(f0)) {
      result.point = unscale(y);
      result.status = SolveStatus::kNumericalFailure;
      result.objective = f0;
      eval_constraints(result.point);
      result.max_constraint_violation = violation_of();
      result.wall_time = seconds_since(start);
      return result;
    }
  }

  int total_iterations = 0;
  SolveStatus status = SolveStatus::kIterationLimit;

  if (second_order) {
    // Feasible-descent scheme built on cheap Gauss-Newton restoration:
    // estimate multipliers at the best feasible point, take one tangential
    // SQP step, restore feasibility, and accept only on objective descent
    // at full feasibility. Progress is monotone over feasible points.
    GaussNewtonInner gn(problem, sigma, lower, upper);

    auto restoration_value = [&](const Eigen::VectorXd& yv) {
      const Eigen::VectorXd z = unscale(yv);
      double value = 0.0;
      if (me > 0) {
        Eigen::VectorXd hv(me);
        problem.equality_constraints(z, hv);
        value += 0.5 * hv.squaredNorm();
      }
      if (mi > 0) {
        Eigen::VectorXd gv(mi);
        problem.inequality_constraints(z, gv);
        for (int i = 0; i < mi; ++i) {
          const double t = std::max(0.0, gv[i]);
          value += 0.5 * t * t;
        }
      }
      return value;
    };
    const Eigen::VectorXd zero_e = Eigen::VectorXd::Zero(me);
    const Eigen::VectorXd zero_i = Eigen::VectorXd::Zero(mi);
    auto restore = [&](Eigen::VectorXd& point, int cap) {
      const InnerResult rr =
          gn.minimize(restoration_value, 0.0, zero_e, zero_i, 1.0, point,
                      1e-9, cap, start, options.wall_clock_budget);
      total_iterations += rr.iterations;
      return rr;
    };

    Eigen::VectorXd lambda_lsq = Eigen::VectorXd::Zero(me);
    Eigen::VectorXd mu_lsq = Eigen::VectorXd::Zero(mi);
    // Multipliers for the equalities and the near-active inequalities by
    // least squares on the stationarity residual.
    auto estimate_multipliers = [&](const Eigen::VectorXd& point) {
      const Eigen::VectorXd z = unscale(point);
      Eigen::VectorXd grad_f(n);
      problem.weighted_gradient(z, 1.0, zero_e, zero_i, grad_f);
      grad_f = grad_f.cwiseProduct(sigma);
      mu_lsq.setZero(mi);
      std::vector<int> active;
      Eigen::MatrixXd ji;
      if (mi > 0) {
        problem.inequality_constraints(z, g_in);
        problem.inequality_jacobian(z, ji);
        ji = ji * sigma.asDiagonal();
        for (int i = 0; i < mi; ++i) {
          if (g_in[i] > -1e-4) active.push_back(i);
        }
      }
      const int na = static_cast<int>(active.size());
      if (me + na == 0) return;
      Eigen::MatrixXd jall(me + na, n);
      if (me > 0) {
        Eigen::MatrixXd je;
        problem.equality_jacobian(z, je);
        jall.topRows(me) = je * sigma.asDiagonal();
      }
      for (int i = 0; i < na; ++i) jall.row(me + i) = ji.row(active[i]);
      Eigen::MatrixXd jjt = jall * jall.transpose();
      jjt.diagonal().array() += 1e-10 * (1.0 + jjt.diagonal().maxCoeff());
      const Eigen::VectorXd mult = jjt.ldlt().solve(-(jall * grad_f));
      lambda_lsq = mult.head(me);
      for (int i = 0; i < na; ++i) {
        mu_lsq[active[i]] = std::max(0.0, mult[me + i]);
      }
    };
    auto kkt_residual = [&](const Eigen::VectorXd& point) {
      const Eigen::VectorXd z = unscale(point);
      problem.weighted_gradient(z, 1.0, lambda_lsq, mu_lsq, grad_z);
      const Eigen::VectorXd gradp = grad_z.cwiseProduct(sigma);
      return (point - (point - gradp).cwiseMax(lower).cwiseMin(upper))
          .lpNorm<Eigen::Infinity>();
    };

    restore(y, std::min(500, options.max_iterations));
    eval_constraints(unscale(y));
    double best_violation = violation_of();
    double best_f = problem.objective(unscale(y));
    Eigen::VectorXd best_y = y;
    double alpha_seed = 1.0;
    int flat_cycles = 0;
    int slow_cycles = 0;
    rho = 1e3;  // weights the near-active obstacle rows in the step model
    constexpr int kMaxCycles = 60;

    for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
      if (total_iterations >= options.max_iterations) {
        status = SolveStatus::kIterationLimit;
        break;
      }
      if (seconds_since(start) > options.wall_clock_budget) {
        status = SolveStatus::kTimeLimit;
        break;
      }
      estimate_multipliers(best_y);
      const double pg = kkt_residual(best_y);
      if (options.verbose) {
        std::printf(
            "  sqp cycle %3d: it %6d pgL %9.2e viol %9.2e f %12.6e a %7.1e\n",
            cycle, total_iterations, pg, best_violation, best_f, alpha_seed);
      }
      if (best_violation <= options.constraint_tolerance &&
          pg <= options.optimality_tolerance) {
        status = SolveStatus::kConverged;
        break;
      }

      const double f_now_before = best_f;
      Eigen::VectorXd d;
      if (!gn.tangential_direction(best_y, lambda_lsq, mu_lsq, rho, d)) {
        status = SolveStatus::kIterationLimit;
        break;
      }
      ++total_iterations;
      const double dmax = d.lpNorm<Eigen::Infinity>();
      double alpha = std::min(alpha_seed, dmax > 2.0 ? 2.0 / dmax : 1.0);
      bool accepted = false;
      for (int ls = 0; ls < 5; ++ls) {
        Eigen::VectorXd trial =
            (best_y + alpha * d).cwiseMax(lower).cwiseMin(upper);
        if ((trial - best_y).lpNorm<Eigen::Infinity>() == 0.0) break;
        restore(trial, std::min(30, std::max(1, options.max_iterations -
                                                    total_iterations)));
        eval_constraints(unscale(trial));
        const double v_try = violation_of();
        const double f_try = problem.objective(unscale(trial));
        if (v_try <= options.constraint_tolerance &&
            f_try < best_f - 1e-10 * (1.0 + std::abs(best_f))) {
          best_y = trial;
          best_f = f_try;
          best_violation = v_try;
          accepted = true;
          break;
        }
        alpha *= 0.25;
        if (seconds_since(start) > options.wall_clock_budget) break;
      }
      if (accepted) {
        alpha_seed = std::min(1.0, 4.0 * alpha);
        flat_cycles = 0;
        // Polishing far below the criterion scale is wasted effort.
        const double progress = f_now_before - best_f;
        if (progress < 1e-3 * (1.0 + std::abs(best_f))) {
          if (++slow_cycles >= 2) {
            status = SolveStatus::kIterationLimit;
            break;
          }
        } else {
          slow_cycles = 0;
        }
      } else {
        ++flat_cycles;
        alpha_seed = 1.0;
        if (flat_cycles >= 2 ||
            best_violation > options.constraint_tolerance) {
          status = best_violation <= options.constraint_tolerance
                       ? SolveStatus::kIterationLimit
                       : SolveStatus::kInfeasible;
          break;
        }
      }
    }

    y = best_y;
    if (status == SolveStatus::kIterationLimit ||
        status == SolveStatus::kTimeLimit) {
      estimate_multipliers(y);
      eval_constraints(unscale(y));
      if (violation_of() <= options.constraint_tolerance &&
          kkt_residual(y) <= options.optimality_tolerance) {
        status = SolveStatus::kConverged;
      }
    }
  } else {
    // First-order path: classic augmented Lagrangian with a projected
    // L-BFGS inner minimization.
    InnerSolver inner(lower, upper);
    double inner_tol = 1e-2;
    double previous_violation = kInf;
    int stagnant_rounds = 0;
    constexpr double kRhoCap = 1e12;
    constexpr int kMaxOuter = 200;

    for (int outer = 0; outer < kMaxOuter; ++outer) {
      const int budget = options.max_iterations - total_iterations;
      if (budget <= 0) {
        status = SolveStatus::kIterationLimit;
        break;
      }
      const InnerResult ir = inner.minimize(la_value, la_gradient, y,
                                            inner_tol, budget, start,
                                            options.wall_clock_budget);
      total_iterations += ir.iterations;

      eval_constraints(unscale(y));
      const double violation = violation_of();
      if (options.verbose) {
        std::printf(
            "  al outer %3d: inner_it %5d pg %9.2e viol %9.2e rho %8.1e\n",
            outer, ir.iterations, ir.projected_gradient_norm, violation, rho);
      }
      if (violation <= options.constraint_tolerance &&
          ir.projected_gradient_norm <= options.optimality_tolerance) {
        status = SolveStatus::kConverged;
        break;
      }
      if (ir.hit_deadline ||
          seconds_since(start) > options.wall_clock_budget) {
        status = SolveStatus::kTimeLimit;
        break;
      }
      if (total_iterations >= options.max_iterations) {
        status = SolveStatus::kIterationLimit;
        break;
      }

      // First-order multiplier update; grow the penalty when the violation
      // fails to shrink by a factor of 4.
      if (violation > 0.25 * previous_violation &&
          violation > options.constraint_tolerance) {
        if (rho < kRhoCap) {
          rho *= 10.0;
        } else {
          ++stagnant_rounds;
          if (stagnant_rounds >= 3) {
            status = SolveStatus::kInfeasible;
            break;
          }
        }
      } else {
        stagnant_rounds = 0;
      }
      lambda += rho * h;
      lambda = lambda.cwiseMax(-1e12).cwiseMin(1e12);
      for (int i = 0; i < mi; ++i) {
        mu[i] = std::min(std::max(0.0, mu[i] + rho * g_in[i]), 1e12);
      }
      previous_violation = violation;
      inner_tol = std::max(0.2 * inner_tol, options.optimality_tolerance);
    }
  }

  result.point = unscale(y);
  result.status = status;
  result.objective = problem.objective(result.point);
  if (!std::isfinite(result.objective)) {
    result.status = SolveStatus::kNumericalFailure;
  }
  eval_constraints(result.point);
  result.max_constraint_violation = violation_of();
  result.iterations = total_iterations;
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace uavtraj::solver
