#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ooc/errors.hpp"
#include "ooc/learners.hpp"
#include "ooc/rng.hpp"

using namespace ooc;

namespace {

Eigen::MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) X(i, j) = rng.normal();
  }
  return X;
}

Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

Eigen::VectorXd sign_labels(const Eigen::VectorXd& scores) {
  Eigen::VectorXd y(scores.size());
  for (Index i = 0; i < scores.size(); ++i) y[i] = scores[i] >= 0 ? 1. : -1.;
  return y;
}

}  // namespace

TEST_CASE("ridge matches its normal-equation solution") {
  const Index n = 40, d = 3;
  const auto X = random_matrix(n, d, 1);
  const auto y = random_vector(n, 2);
  LearnerSpec spec;
  spec.kind = LearnerKind::ridge;
  spec.reg_strength = 0.37;
  const auto model = fit(spec, X, y);

  // objective = mean squared error + lambda * ||w||^2 (intercept free), so
  // the stationarity condition is  Xa' Xa w + n lambda I0 w = Xa' y.
  Eigen::MatrixXd Xa(n, d + 1);
  Xa.col(0).setOnes();
  Xa.rightCols(d) = X;
  Eigen::MatrixXd H = Xa.transpose() * Xa;
  for (Index j = 1; j <= d; ++j) H(j, j) += n * spec.reg_strength;
  const Eigen::VectorXd expected = H.ldlt().solve(Xa.transpose() * y);
  CHECK((model.weights - expected).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(model.converged);
}

TEST_CASE("unregularized rank-deficient ridge returns the minimum-norm "
          "interpolant") {
  // Augmented rows (1, 1, 0) and (1, 0, 1); the minimum-norm solution of
  // v . row = y is v = (1, 0, 1).
  Eigen::MatrixXd X(2, 2);
  X << 1, 0, 0, 1;
  Eigen::VectorXd y(2);
  y << 1, 2;
  LearnerSpec spec;
  spec.reg_strength = 0.0;
  const auto model = fit(spec, X, y);
  Eigen::VectorXd expected(3);
  expected << 1, 0, 1;
  CHECK((model.weights - expected).cwiseAbs().maxCoeff() < 1e-10);
  const auto scores = predict_scores(model, X);
  CHECK(std::abs(scores[0] - 1) < 1e-10);
  CHECK(std::abs(scores[1] - 2) < 1e-10);
}

TEST_CASE("analytic gradients match finite differences") {
  const Index n = 20, d = 3;
  for (LearnerKind kind : {LearnerKind::ridge, LearnerKind::logistic_l2,
                           LearnerKind::squared_hinge_l2}) {
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const auto X = random_matrix(n, d, 10 + rep);
      Eigen::VectorXd y = random_vector(n, 20 + rep);
      if (kind != LearnerKind::ridge) y = sign_labels(y);
      const auto w = 0.5 * random_vector(d + 1, 30 + rep);
      LearnerSpec spec;
      spec.kind = kind;
      spec.reg_strength = 0.2;

      const Eigen::VectorXd g = objective_gradient(spec, w, X, y);
      Eigen::VectorXd fd(d + 1);
      const double h = 1e-6;
      for (Index j = 0; j <= d; ++j) {
        Eigen::VectorXd wp = w, wm = w;
        wp[j] += h;
        wm[j] -= h;
        fd[j] = (objective(spec, wp, X, y) - objective(spec, wm, X, y)) /
                (2 * h);
      }
      const double rel =
          (g - fd).norm() / std::max(1.0, std::max(g.norm(), fd.norm()));
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("margin learners separate separable data") {
  const Index n = 60, d = 2;
  const auto X = random_matrix(n, d, 3);
  const Eigen::VectorXd truth = (Eigen::VectorXd(d + 1) << 0.2, 1.5, -2.0)
                                    .finished();
  Eigen::VectorXd scores(n);
  for (Index i = 0; i < n; ++i) {
    scores[i] = truth[0] + X.row(i).dot(truth.tail(d));
  }
  const auto y = sign_labels(scores);

  for (LearnerKind kind :
       {LearnerKind::logistic_l2, LearnerKind::squared_hinge_l2}) {
    LearnerSpec spec;
    spec.kind = kind;
    spec.reg_strength = 0.01;
    const auto model = fit(spec, X, y);
    CHECK(model.converged);
    const auto fitted = predict_scores(model, X);
    CHECK(empirical_loss(model, X, y, LossKind::zero_one) < 0.05);
    // training drove the regularized objective below the zero start
    CHECK(objective(spec, model.weights, X, y) <
          objective(spec, Eigen::VectorXd::Zero(d + 1), X, y));
    (void)fitted;
  }
}

TEST_CASE("margin learners insist on sign labels") {
  const auto X = random_matrix(10, 2, 4);
  Eigen::VectorXd y = random_vector(10, 5);  // real-valued
  LearnerSpec spec;
  spec.kind = LearnerKind::logistic_l2;
  CHECK_THROWS_AS(fit(spec, X, y), Error);
}

TEST_CASE("pointwise losses follow their definitions") {
  CHECK(loss_value(LossKind::squared_error, 2.0, 0.5) == doctest::Approx(2.25));
  CHECK(loss_value(LossKind::log_loss, 0.0, 1.0) ==
        doctest::Approx(std::log(2.0)));
  // stable at extreme margins
  CHECK(loss_value(LossKind::log_loss, 40.0, 1.0) < 1e-15);
  CHECK(loss_value(LossKind::log_loss, -40.0, 1.0) ==
        doctest::Approx(40.0).epsilon(1e-9));
  CHECK(loss_value(LossKind::squared_hinge, 0.5, 1.0) == doctest::Approx(0.25));
  CHECK(loss_value(LossKind::squared_hinge, 2.0, 1.0) == 0.0);
  // zero-one thresholds at zero with sign(0) = +1
  CHECK(loss_value(LossKind::zero_one, 0.0, 1.0) == 0.0);
  CHECK(loss_value(LossKind::zero_one, 0.0, -1.0) == 1.0);
  CHECK(loss_value(LossKind::zero_one, -0.1, -1.0) == 0.0);
}

TEST_CASE("empirical_loss is the plain mean of pointwise losses") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 2.0;
  Eigen::VectorXd y(2);
  y << 1.0, 1.0;
  FittedModel model;
  model.weights = (Eigen::VectorXd(2) << 0.0, 1.0).finished();  // score = x
  const double expected = (0.0 + 1.0) / 2.0;  // (1-1)^2 and (2-1)^2
  CHECK(empirical_loss(model, X, y, LossKind::squared_error) ==
        doctest::Approx(expected));
}

TEST_CASE("names round trip and unknown names are rejected") {
  for (LearnerKind kind : {LearnerKind::ridge, LearnerKind::logistic_l2,
                           LearnerKind::squared_hinge_l2}) {
    CHECK(learner_from_name(learner_name(kind)) == kind);
  }
  for (LossKind loss : {LossKind::squared_error, LossKind::log_loss,
                        LossKind::squared_hinge, LossKind::zero_one}) {
    CHECK(loss_from_name(loss_name(loss)) == loss);
  }
  CHECK_THROWS_AS(learner_from_name("svm"), Error);
  CHECK_THROWS_AS(loss_from_name("absolute"), Error);
}

TEST_CASE("training_loss pairs each learner with its objective") {
  CHECK(training_loss(LearnerKind::ridge) == LossKind::squared_error);
  CHECK(training_loss(LearnerKind::logistic_l2) == LossKind::log_loss);
  CHECK(training_loss(LearnerKind::squared_hinge_l2) ==
        LossKind::squared_hinge);
}
