#pragma once

#include <Eigen/Dense>

#include "ooc/dataset.hpp"

namespace ooc {

struct TrendFilterConfig {
  int order = 4;        // difference order of the roughness penalty
  double lambda = 0.1;  // penalty weight
  bool monotone = true; // constrain the solution to be nonincreasing
  bool nonneg = false;  // constrain the solution to be >= 0
  int max_iter = 2000;
  double tol = 1e-10;
};

struct SolveResult {
  Eigen::VectorXd solution;
  double residual_norm = 0.0;  // ||A x - b||_2
  bool converged = true;
  int iterations = 0;
  double condition_estimate = 0.0;  // 0 when not computed
  bool rank_deficient = false;
  double kkt_residual = 0.0;  // projected-gradient fixed-point residual
};

/// Minimum-norm least squares via complete orthogonal decomposition.  Never
/// forms normal equations; flags rank deficiency instead of failing.
SolveResult least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Order-k forward difference operator with (size - order) rows:
/// (D x)_i = sum_j (-1)^(order - j) C(order, j) x_{i+j}.
Eigen::MatrixXd difference_operator(int order, Index size);

/// Nonincreasing isotonic fit (pool-adjacent-violators, unit weights); the
/// Euclidean projection onto the monotone cone.
Eigen::VectorXd isotonic_nonincreasing(const Eigen::VectorXd& v);

/// Euclidean projection onto the requested constraint set.  Clipping the
/// monotone projection at 0 is exact for the intersection because the
/// nonincreasing cone is closed under componentwise max with a constant.
Eigen::VectorXd project_constraints(const Eigen::VectorXd& v, bool monotone,
                                    bool nonneg);

/// Objective minimized by constrained_solve:
/// ||A x - b||^2 + lambda ||D x||^2.
double trend_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const TrendFilterConfig& cfg, const Eigen::VectorXd& x);

/// Trend-filtered, optionally shape-constrained solve of A x ~ b.
///
/// Without constraints this reduces to least squares on the stacked system
/// [A; sqrt(lambda) D].  With constraints it runs ADMM with the quadratic
/// solved by a cached LDLT factorization and the projection step handled by
/// project_constraints, so the returned iterate is feasible exactly.  The
/// reported iterate is the feasible one with the best objective seen, which
/// makes the accepted-objective sequence nonincreasing by construction.
SolveResult constrained_solve(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& b,
                              const TrendFilterConfig& cfg);

}  // namespace ooc
