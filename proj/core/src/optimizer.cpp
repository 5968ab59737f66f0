#include "flapkin/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flapkin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double violation_of(const Eigen::VectorXd& c) { return c.size() ? std::max(0.0, c.maxCoeff()) : 0.0; }

double mean_square(const Eigen::VectorXd& y) { return y.size() ? y.squaredNorm() / static_cast<double>(y.size()) : 0.0; }

class Solver {
 public:
  Solver(const BoxProblem& p, const AugLagOptions& o) : p_(p), o_(o) {}

  int evaluations = 0;
  int iterations = 0;

  bool exhausted() const { return evaluations >= o_.max_evaluations; }

  void raw(const Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& c) {
    ++evaluations;
    p_.evaluate(x, y, c);
  }

  // Stacked residual of the augmented Lagrangian subproblem.
  Eigen::VectorXd augmented(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda, double rho) {
    Eigen::VectorXd y, c;
    raw(x, y, c);
    Eigen::VectorXd r(y.size() + c.size());
    r.head(y.size()) = y / std::sqrt(static_cast<double>(std::max<Eigen::Index>(y.size(), 1)));
    const double w = std::sqrt(rho / 2.0);
    for (Eigen::Index i = 0; i < c.size(); ++i) r[y.size() + i] = w * std::max(0.0, c[i] + lambda[i] / rho);
    return r;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r0, const Eigen::VectorXd& lambda,
                           double rho) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd J(r0.size(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = o_.fd_step * std::max(1.0, std::abs(x[i]));
      const double room_up = p_.upper[i] - x[i];
      const double room_down = x[i] - p_.lower[i];
      Eigen::VectorXd xp = x, xm = x;
      if (room_up >= h && room_down >= h) {
        xp[i] += h;
        xm[i] -= h;
        J.col(i) = (augmented(xp, lambda, rho) - augmented(xm, lambda, rho)) / (2.0 * h);
      } else if (room_up >= room_down && room_up > 0.0) {
        const double s = std::min(h, room_up);
        xp[i] += s;
        J.col(i) = (augmented(xp, lambda, rho) - r0) / s;
      } else if (room_down > 0.0) {
        const double s = std::min(h, room_down);
        xm[i] -= s;
        J.col(i) = (r0 - augmented(xm, lambda, rho)) / s;
      } else {
        J.col(i).setZero();
      }
    }
    return J;
  }

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(p_.lower).cwiseMin(p_.upper); }

  // Bound-constrained Levenberg-Marquardt on the augmented residual.
  Eigen::VectorXd inner(Eigen::VectorXd x, const Eigen::VectorXd& lambda, double rho) {
    Eigen::VectorXd r = augmented(x, lambda, rho);
    double f = r.squaredNorm();
    double mu = 1e-3;
    const Eigen::Index n = x.size();
    for (int it = 0; it < o_.max_inner && !exhausted(); ++it) {
      ++iterations;
      const Eigen::MatrixXd J = jacobian(x, r, lambda, rho);
      const Eigen::VectorXd g = J.transpose() * r;
      // Variables pinned at a bound with the gradient pushing outward stay put.
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lo = x[i] <= p_.lower[i] && g[i] > 0.0;
        const bool at_hi = x[i] >= p_.upper[i] && g[i] < 0.0;
        if (!at_lo && !at_hi) free.push_back(i);
      }
      if (free.empty()) break;
      const Eigen::Index m = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd A(m, m);
      Eigen::VectorXd gf(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        gf[a] = g[free[a]];
        for (Eigen::Index b = 0; b < m; ++b) A(a, b) = J.col(free[a]).dot(J.col(free[b]));
      }
      const double dmax = std::max(A.diagonal().maxCoeff(), 1e-300);
      bool accepted = false;
      Eigen::VectorXd x_new;
      Eigen::VectorXd r_new;
      double f_new = f;
      while (mu < 1e14 && !exhausted()) {
        Eigen::MatrixXd M = A;
        for (Eigen::Index a = 0; a < m; ++a) M(a, a) += mu * std::max(A(a, a), 1e-9 * dmax);
        const Eigen::VectorXd step = M.ldlt().solve(-gf);
        x_new = x;
        for (Eigen::Index a = 0; a < m; ++a) x_new[free[a]] += step[a];
        x_new = clamp(x_new);
        r_new = augmented(x_new, lambda, rho);
        f_new = r_new.squaredNorm();
        if (std::isfinite(f_new) && f_new < f) {
          accepted = true;
          mu = std::max(mu / 3.0, 1e-12);
          break;
        }
        mu *= 4.0;
      }
      if (!accepted) break;
      const double drop = f - f_new;
      const double dx = (x_new - x).cwiseAbs().maxCoeff();
      x = x_new;
      r = r_new;
      f = f_new;
      if (drop <= 1e-14 * f + 1e-30 || dx <= 1e-13 * (1.0 + x.cwiseAbs().maxCoeff())) break;
    }
    return x;
  }

 private:
  const BoxProblem& p_;
  const AugLagOptions& o_;
};

}  // namespace

AugLagResult minimize_augmented_lagrangian(const BoxProblem& problem, const Eigen::VectorXd& x0,
                                           const AugLagOptions& opts) {
  Solver s(problem, opts);
  AugLagResult out;
  Eigen::VectorXd x = x0.cwiseMax(problem.lower).cwiseMin(problem.upper);
  Eigen::VectorXd y, c;
  s.raw(x, y, c);
  double f = mean_square(y);
  double viol = violation_of(c);

  double best = kInf;
  Eigen::VectorXd best_x = x;
  double best_viol = viol;
  if (viol <= opts.feasibility_tol && std::isfinite(f)) {
    best = f;
    best_x = x;
  }
  out.history.push_back(best);

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(c.size());
  double rho = opts.rho0;
  double prev_viol = viol;
  if (!(best <= opts.converged_cost)) {
    for (int outer = 0; outer < opts.max_outer; ++outer) {
      if (s.exhausted()) {
        out.budget_exhausted = true;
        break;
      }
      const double f_prev = f;
      x = s.inner(x, lambda, rho);
      s.raw(x, y, c);
      f = mean_square(y);
      viol = violation_of(c);
      if (viol <= opts.feasibility_tol && f < best) {
        best = f;
        best_x = x;
        best_viol = viol;
      } else if (!std::isfinite(best) && viol < best_viol) {
        best_x = x;
        best_viol = viol;
      }
      out.history.push_back(best);
      for (Eigen::Index i = 0; i < c.size(); ++i) lambda[i] = std::max(0.0, lambda[i] + rho * c[i]);
      if (viol > opts.feasibility_tol && viol > 0.25 * prev_viol) rho = std::min(rho * 10.0, 1e10);
      prev_viol = viol;
      if (viol <= opts.feasibility_tol &&
          (f <= opts.converged_cost || std::abs(f_prev - f) <= 1e-10 * (1.0 + f))) {
        break;
      }
    }
    if (s.exhausted()) out.budget_exhausted = true;
  }

  out.x = best_x;
  s.raw(out.x, y, c);
  out.cost = mean_square(y);
  out.violation = violation_of(c);
  out.feasible = out.violation <= opts.feasibility_tol;
  out.iterations = s.iterations;
  out.evaluations = s.evaluations;
  return out;
}

}  // namespace flapkin
