#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ooc/errors.hpp"
#include "ooc/rng.hpp"
#include "ooc/solvers.hpp"

using namespace ooc;

namespace {

Eigen::MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd A(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) A(i, j) = rng.normal();
  }
  return A;
}

Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

bool nonincreasing(const Eigen::VectorXd& v, double tol) {
  for (Index i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] > v[i] + tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("least_squares solves the classic 3x2 example") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd b(3);
  b << 1, 1, 1;
  const auto res = least_squares(A, b);
  CHECK(res.solution[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(res.solution[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(res.residual_norm == doctest::Approx((A * res.solution - b).norm()));
  CHECK_FALSE(res.rank_deficient);
  CHECK(res.converged);
  CHECK(res.condition_estimate >= 1.0);
}

TEST_CASE("least_squares returns the minimum-norm solution when "
          "underdetermined") {
  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  Eigen::VectorXd b(1);
  b << 2;
  const auto res = least_squares(A, b);
  CHECK(res.rank_deficient);
  CHECK(res.solution[0] == doctest::Approx(1.0));
  CHECK(res.solution[1] == doctest::Approx(1.0));
}

TEST_CASE("difference_operator builds signed binomial stencils") {
  const auto D1 = difference_operator(1, 4);
  REQUIRE(D1.rows() == 3);
  REQUIRE(D1.cols() == 4);
  Eigen::RowVectorXd row1(4);
  row1 << -1, 1, 0, 0;
  CHECK(D1.row(0) == row1);

  const auto D2 = difference_operator(2, 5);
  Eigen::RowVectorXd row2(5);
  row2 << 1, -2, 1, 0, 0;
  CHECK(D2.row(0) == row2);

  const auto D4 = difference_operator(4, 6);
  Eigen::RowVectorXd row4(6);
  row4 << 1, -4, 6, -4, 1, 0;
  CHECK(D4.row(0) == row4);
}

TEST_CASE("order-k differences annihilate degree-(k-1) polynomials") {
  const Index m = 30;
  Eigen::VectorXd cubic(m);
  for (Index i = 0; i < m; ++i) {
    const double x = static_cast<double>(i);
    cubic[i] = 2.0 + 0.5 * x - 0.25 * x * x + 0.01 * x * x * x;
  }
  const auto D = difference_operator(4, m);
  CHECK((D * cubic).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("isotonic_nonincreasing reproduces hand-worked pools") {
  Eigen::VectorXd v(3);
  v << 3, 1, 2;
  const auto fit = isotonic_nonincreasing(v);
  CHECK(fit[0] == doctest::Approx(3.0));
  CHECK(fit[1] == doctest::Approx(1.5));
  CHECK(fit[2] == doctest::Approx(1.5));

  Eigen::VectorXd up(3);
  up << 1, 2, 3;
  const auto flat = isotonic_nonincreasing(up);
  for (Index i = 0; i < 3; ++i) CHECK(flat[i] == doctest::Approx(2.0));

  Eigen::VectorXd down(4);
  down << 4, 3, 2, 1;
  CHECK(isotonic_nonincreasing(down) == down);
}

TEST_CASE("isotonic fit is a genuine Euclidean projection") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd v(6);
    for (Index i = 0; i < 6; ++i) v[i] = rng.normal();
    const auto fit = isotonic_nonincreasing(v);
    CHECK(nonincreasing(fit, 1e-12));
    CHECK(fit.sum() == doctest::Approx(v.sum()));  // block means preserve mass
    CHECK(isotonic_nonincreasing(fit) == fit);     // idempotent

    // no random feasible point does better
    const double dist = (v - fit).squaredNorm();
    for (int probe = 0; probe < 100; ++probe) {
      Eigen::VectorXd w(6);
      for (Index i = 0; i < 6; ++i) w[i] = 3.0 * rng.normal();
      std::sort(w.data(), w.data() + 6, std::greater<double>());
      CHECK((v - w).squaredNorm() >= dist - 1e-9);
    }
  }
}

TEST_CASE("project_constraints composes monotone and nonnegative parts") {
  Eigen::VectorXd v(4);
  v << -1.0, 2.0, 1.0, -3.0;
  const auto mono = project_constraints(v, true, false);
  CHECK(nonincreasing(mono, 1e-12));
  const auto both = project_constraints(v, true, true);
  CHECK(nonincreasing(both, 1e-12));
  CHECK(both.minCoeff() >= 0.0);
  const auto none = project_constraints(v, false, false);
  CHECK(none == v);
  const auto pos = project_constraints(v, false, true);
  CHECK(pos.minCoeff() >= 0.0);
  CHECK(pos[1] == 2.0);
}

TEST_CASE("constrained_solve without penalty or constraints is least "
          "squares") {
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto A = random_matrix(12, 5, 100 + rep);
    const auto b = random_vector(12, 200 + rep);
    TrendFilterConfig cfg;
    cfg.lambda = 0.0;
    cfg.monotone = false;
    cfg.nonneg = false;
    const auto direct = least_squares(A, b);
    const auto via_solver = constrained_solve(A, b, cfg);
    CHECK((direct.solution - via_solver.solution).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("penalized unconstrained solve matches the stacked system") {
  const auto A = random_matrix(15, 8, 7);
  const auto b = random_vector(15, 8);
  TrendFilterConfig cfg;
  cfg.order = 4;
  cfg.lambda = 0.3;
  cfg.monotone = false;
  const auto res = constrained_solve(A, b, cfg);

  const auto D = difference_operator(cfg.order, 8);
  Eigen::MatrixXd stacked(15 + D.rows(), 8);
  stacked.topRows(15) = A;
  stacked.bottomRows(D.rows()) = std::sqrt(cfg.lambda) * D;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(stacked.rows());
  rhs.head(15) = b;
  const auto direct = least_squares(stacked, rhs);
  CHECK((res.solution - direct.solution).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("monotone solves return feasible iterates with small stationarity "
          "residual") {
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto A = random_matrix(20, 9, 300 + rep);
    Eigen::VectorXd truth(9);
    for (Index i = 0; i < 9; ++i) truth[i] = 2.0 - 0.25 * i;
    const Eigen::VectorXd b =
        A * truth + 0.01 * random_vector(20, 400 + rep);
    TrendFilterConfig cfg;
    cfg.order = 4;
    cfg.lambda = 0.05;
    cfg.monotone = true;
    const auto res = constrained_solve(A, b, cfg);
    CHECK(nonincreasing(res.solution, 1e-9));
    CHECK(res.converged);
    CHECK(res.kkt_residual < 1e-6);
    CHECK(res.iterations > 0);

    // feasible and no worse than projecting the unconstrained answer
    TrendFilterConfig loose = cfg;
    loose.monotone = false;
    const auto unconstrained = constrained_solve(A, b, loose);
    const auto projected =
        project_constraints(unconstrained.solution, true, false);
    CHECK(trend_objective(A, b, cfg, res.solution) <=
          trend_objective(A, b, cfg, projected) + 1e-6);
  }
}

TEST_CASE("trend_objective is the documented sum") {
  const auto A = random_matrix(6, 4, 17);
  const auto b = random_vector(6, 18);
  const auto x = random_vector(4, 19);
  TrendFilterConfig cfg;
  cfg.order = 2;
  cfg.lambda = 0.7;
  const auto D = difference_operator(2, 4);
  const double expected =
      (A * x - b).squaredNorm() + cfg.lambda * (D * x).squaredNorm();
  CHECK(trend_objective(A, b, cfg, x) == doctest::Approx(expected));
}

TEST_CASE("constrained solves are bitwise deterministic") {
  const auto A = random_matrix(18, 7, 5);
  const auto b = random_vector(18, 6);
  TrendFilterConfig cfg;
  const auto r1 = constrained_solve(A, b, cfg);
  const auto r2 = constrained_solve(A, b, cfg);
  CHECK(r1.solution == r2.solution);
  CHECK(r1.iterations == r2.iterations);
}
