#include "ooc/solvers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "ooc/errors.hpp"

namespace ooc {

SolveResult least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() == 0 || A.cols() == 0) {
    fail(errc::invalid_config, "least_squares needs a nonempty matrix");
  }
  if (A.rows() != b.size()) {
    fail(errc::dimension_mismatch, "A has " + std::to_string(A.rows()) +
                                       " rows but b has " +
                                       std::to_string(b.size()));
  }
  SolveResult result;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  result.solution = cod.solve(b);
  result.rank_deficient = cod.rank() < A.cols();
  const Index r = cod.rank();
  if (r > 0) {
    // Diagonal of the triangular factor gives a cheap condition estimate.
    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < r; ++i) {
      const double d = std::abs(cod.matrixT()(i, i));
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    result.condition_estimate = dmin > 0 ? dmax / dmin
                                         : std::numeric_limits<double>::infinity();
  }
  result.residual_norm = (A * result.solution - b).norm();
  result.kkt_residual =
      (2.0 * (A.transpose() * (A * result.solution - b))).norm();
  result.converged = true;
  result.iterations = 0;
  return result;
}

Eigen::MatrixXd difference_operator(int order, Index size) {
  if (order < 1) fail(errc::invalid_config, "difference order must be >= 1");
  if (size < 1) fail(errc::invalid_config, "difference operator needs size >= 1");
  const Index rows = std::max<Index>(0, size - order);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, size);
  // Binomial coefficients C(order, j), exact for any sane order.
  std::vector<double> binom(static_cast<size_t>(order) + 1, 1.0);
  for (int j = 1; j <= order; ++j) {
    binom[static_cast<size_t>(j)] =
        binom[static_cast<size_t>(j) - 1] *
        static_cast<double>(order - j + 1) / static_cast<double>(j);
  }
  for (Index i = 0; i < rows; ++i) {
    for (int j = 0; j <= order; ++j) {
      const double sign = ((order - j) % 2 == 0) ? 1.0 : -1.0;
      D(i, i + j) = sign * binom[static_cast<size_t>(j)];
    }
  }
  return D;
}

Eigen::VectorXd isotonic_nonincreasing(const Eigen::VectorXd& v) {
  const Index n = v.size();
  // Pool adjacent violators on block (mean, count) pairs.
  std::vector<double> mean;
  std::vector<Index> count;
  mean.reserve(static_cast<size_t>(n));
  count.reserve(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    mean.push_back(v[i]);
    count.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] < mean.back()) {
      const double m2 = mean.back();
      const Index c2 = count.back();
      mean.pop_back();
      count.pop_back();
      const double m1 = mean.back();
      const Index c1 = count.back();
      mean.back() = (m1 * static_cast<double>(c1) +
                     m2 * static_cast<double>(c2)) /
                    static_cast<double>(c1 + c2);
      count.back() = c1 + c2;
    }
  }
  Eigen::VectorXd out(n);
  Index pos = 0;
  for (size_t blk = 0; blk < mean.size(); ++blk) {
    for (Index j = 0; j < count[blk]; ++j) out[pos++] = mean[blk];
  }
  return out;
}

Eigen::VectorXd project_constraints(const Eigen::VectorXd& v, bool monotone,
                                    bool nonneg) {
  Eigen::VectorXd out = monotone ? isotonic_nonincreasing(v) : v;
  if (nonneg) out = out.cwiseMax(0.0);
  return out;
}

double trend_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                       const TrendFilterConfig& cfg,
                       const Eigen::VectorXd& x) {
  double obj = (A * x - b).squaredNorm();
  if (cfg.lambda > 0 && x.size() > cfg.order) {
    const Eigen::MatrixXd D = difference_operator(cfg.order, x.size());
    obj += cfg.lambda * (D * x).squaredNorm();
  }
  return obj;
}

SolveResult constrained_solve(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& b,
                              const TrendFilterConfig& cfg) {
  if (A.rows() == 0 || A.cols() == 0) {
    fail(errc::invalid_config, "constrained_solve needs a nonempty matrix");
  }
  if (A.rows() != b.size()) {
    fail(errc::dimension_mismatch, "A/b size mismatch");
  }
  if (cfg.lambda < 0) fail(errc::invalid_config, "lambda must be >= 0");
  if (cfg.order < 1) fail(errc::invalid_config, "order must be >= 1");
  if (cfg.max_iter < 1) fail(errc::invalid_config, "max_iter must be >= 1");
  if (cfg.tol <= 0) fail(errc::invalid_config, "tol must be > 0");

  const Index q = A.cols();
  const Eigen::MatrixXd D = difference_operator(cfg.order, q);
  const bool penalized = cfg.lambda > 0 && D.rows() > 0;

  // Unconstrained solves reduce to least squares on the stacked system.
  auto stacked_solve = [&]() {
    if (!penalized) return least_squares(A, b);
    Eigen::MatrixXd B(A.rows() + D.rows(), q);
    B.topRows(A.rows()) = A;
    B.bottomRows(D.rows()) = std::sqrt(cfg.lambda) * D;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(B.rows());
    rhs.head(A.rows()) = b;
    SolveResult r = least_squares(B, rhs);
    r.residual_norm = (A * r.solution - b).norm();
    return r;
  };

  if (!cfg.monotone && !cfg.nonneg) {
    SolveResult result = stacked_solve();
    Eigen::VectorXd grad =
        2.0 * (A.transpose() * (A * result.solution - b));
    if (penalized) {
      grad += 2.0 * cfg.lambda * (D.transpose() * (D * result.solution));
    }
    result.kkt_residual = grad.norm();
    return result;
  }

  // ADMM: quadratic step solved with one cached factorization, projection
  // step handled exactly by project_constraints.
  Eigen::MatrixXd H = 2.0 * (A.transpose() * A);
  if (penalized) H += 2.0 * cfg.lambda * (D.transpose() * D);
  const double rho = std::max(1e-8, H.trace() / static_cast<double>(q));
  Eigen::MatrixXd M = H;
  M.diagonal().array() += rho;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success) {
    fail(errc::singular_system, "ADMM quadratic step is not factorizable");
  }
  const Eigen::VectorXd c = 2.0 * (A.transpose() * b);

  auto objective_at = [&](const Eigen::VectorXd& x) {
    return trend_objective(A, b, cfg, x);
  };

  Eigen::VectorXd z =
      project_constraints(stacked_solve().solution, cfg.monotone, cfg.nonneg);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd best = z;
  double best_obj = objective_at(z);
  [[maybe_unused]] double prev_accepted = best_obj;

  SolveResult result;
  result.converged = false;
  const double sqrt_q = std::sqrt(static_cast<double>(q));
  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    const Eigen::VectorXd e = ldlt.solve(c + rho * (z - u));
    const Eigen::VectorXd z_new =
        project_constraints(e + u, cfg.monotone, cfg.nonneg);
    u += e - z_new;

    const double obj = objective_at(z_new);
    if (obj < best_obj) {
      best_obj = obj;
      best = z_new;
    }
#ifndef NDEBUG
    // The accepted (best feasible) objective never rises.
    assert(best_obj <=
           prev_accepted + 1e-9 * (1.0 + std::abs(prev_accepted)));
    prev_accepted = best_obj;
#endif

    const double primal = (e - z_new).norm();
    const double dual = rho * (z_new - z).norm();
    z = z_new;
    const double eps_pri =
        sqrt_q * cfg.tol + cfg.tol * std::max(e.norm(), z.norm());
    const double eps_dual = sqrt_q * cfg.tol + cfg.tol * rho * u.norm();
    if (primal <= eps_pri && dual <= eps_dual) {
      result.converged = true;
      ++iter;
      break;
    }
  }

  result.solution = best;
  result.iterations = iter;
  result.residual_norm = (A * best - b).norm();

  // KKT check: a constrained minimizer is a fixed point of the projected
  // gradient map for any positive step; 1/||H||_F is a safe step.
  Eigen::VectorXd grad = 2.0 * (A.transpose() * (A * best - b));
  if (penalized) {
    grad += 2.0 * cfg.lambda * (D.transpose() * (D * best));
  }
  const double eta = 1.0 / std::max(H.norm(), 1e-30);
  result.kkt_residual =
      (project_constraints(best - eta * grad, cfg.monotone, cfg.nonneg) - best)
          .norm();
  return result;
}

}  // namespace ooc
