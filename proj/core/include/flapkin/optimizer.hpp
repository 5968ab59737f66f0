#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace flapkin {

/// min |y(x)|^2 / len(y)  subject to  lower <= x <= upper,  c(x) <= 0.
struct BoxProblem {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& c)> evaluate;
};

struct AugLagOptions {
  int max_outer = 12;
  int max_inner = 60;
  int max_evaluations = 200000;
  double fd_step = 1e-6;  ///< relative central-difference step
  double feasibility_tol = 1e-6;
  double converged_cost = 1e-12;
  double rho0 = 10.0;
};

struct AugLagResult {
  Eigen::VectorXd x;
  double cost = 0.0;
  double violation = 0.0;
  bool feasible = false;
  bool budget_exhausted = false;
  int iterations = 0;  ///< inner iterations over all outer rounds
  int evaluations = 0;
  /// Best feasible cost after each outer round (+inf while none).
  std::vector<double> history;
};

/// Powell-Hestenes-Rockafellar augmented Lagrangian; each subproblem is a
/// bound-constrained Levenberg-Marquardt solve on the stacked residual
/// [y / sqrt(len y); sqrt(rho/2) max(0, c + lambda/rho)] with
/// finite-difference Jacobians. Every evaluated x lies inside the box.
/// Returns the best feasible iterate seen, else the last one.
AugLagResult minimize_augmented_lagrangian(const BoxProblem& problem, const Eigen::VectorXd& x0,
                                           const AugLagOptions& opts = {});

}  // namespace flapkin
