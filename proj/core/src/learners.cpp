#include "ooc/learners.hpp"

#include <cmath>

#include "ooc/errors.hpp"

namespace ooc {

namespace {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Eigen::MatrixXd augment(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd Xa(X.rows(), X.cols() + 1);
  Xa.col(0).setOnes();
  Xa.rightCols(X.cols()) = X;
  return Xa;
}

void check_shapes(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() == 0) fail(errc::empty_dataset, "cannot fit on zero rows");
  if (X.rows() != y.size()) {
    fail(errc::dimension_mismatch, "X has " + std::to_string(X.rows()) +
                                       " rows but y has " +
                                       std::to_string(y.size()));
  }
  if (!X.allFinite() || !y.allFinite()) {
    fail(errc::non_finite_value, "non-finite training value");
  }
}

void check_margin_labels(const Eigen::VectorXd& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] != 1.0 && y[i] != -1.0) {
      fail(errc::invalid_labels,
           "margin learners need labels in {-1, +1}; got " +
               std::to_string(y[i]));
    }
  }
}

// Per-sample value, d/dscore and curvature weight for the two margin
// objectives, written to stay finite for |score| up to ~1e3 and beyond.
struct MarginTerms {
  double value, dscore, weight;
};

MarginTerms logistic_terms(double score, double label) {
  const double t = label * score;
  const double e = std::exp(-std::abs(t));
  const double sig_t = t >= 0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
  // sigma(t) * sigma(-t), symmetric in the sign of t.
  const double w = e / ((1.0 + e) * (1.0 + e));
  return {softplus(-t), -label * (1.0 - sig_t), w};
}

MarginTerms squared_hinge_terms(double score, double label) {
  const double slack = 1.0 - label * score;
  if (slack <= 0) return {0.0, 0.0, 0.0};
  return {slack * slack, -2.0 * label * slack, 2.0};
}

MarginTerms margin_terms(LearnerKind kind, double score, double label) {
  return kind == LearnerKind::logistic_l2
             ? logistic_terms(score, label)
             : squared_hinge_terms(score, label);
}

FittedModel fit_ridge(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y) {
  const Index n = X.rows();
  const Index dim = X.cols() + 1;
  const double lambda = spec.reg_strength;
  const Index extra = lambda > 0 ? X.cols() : 0;

  // Least squares on [Xa/sqrt(n); sqrt(lambda) * J] where J selects the
  // non-intercept weights.  Complete orthogonal decomposition returns the
  // minimum-norm solution when the system is rank deficient (lambda = 0).
  Eigen::MatrixXd B(n + extra, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + extra);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  B.topRows(n) = augment(X) * scale;
  rhs.head(n) = y * scale;
  if (extra > 0) {
    B.bottomRows(extra).setZero();
    const double root = std::sqrt(lambda);
    for (Index j = 0; j < extra; ++j) B(n + j, j + 1) = root;
  }

  FittedModel model;
  model.spec = spec;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(B);
  model.weights = cod.solve(rhs);
  model.final_grad_norm =
      objective_gradient(spec, model.weights, X, y).norm();
  model.converged = model.final_grad_norm <= spec.tol;
  model.iterations = 1;
  return model;
}

FittedModel fit_margin(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y) {
  check_margin_labels(y);
  const Index n = X.rows();
  const Index dim = X.cols() + 1;
  const Eigen::MatrixXd Xa = augment(X);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double lambda = spec.reg_strength;

  auto eval = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad,
                  Eigen::MatrixXd* hess) {
    const Eigen::VectorXd scores = Xa * v;
    double f = 0.0;
    Eigen::VectorXd dscore(n), weight(n);
    for (Index i = 0; i < n; ++i) {
      const MarginTerms t = margin_terms(spec.kind, scores[i], y[i]);
      f += t.value;
      dscore[i] = t.dscore;
      weight[i] = t.weight;
    }
    f *= inv_n;
    for (Index j = 1; j < dim; ++j) f += lambda * v[j] * v[j];
    if (grad) {
      *grad = inv_n * (Xa.transpose() * dscore);
      grad->tail(dim - 1) += 2.0 * lambda * v.tail(dim - 1);
    }
    if (hess) {
      *hess = inv_n *
              (Xa.transpose() * weight.asDiagonal() * Xa);
      for (Index j = 1; j < dim; ++j) (*hess)(j, j) += 2.0 * lambda;
    }
    return f;
  };

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd grad(dim);
  Eigen::MatrixXd hess(dim, dim);
  double f = eval(v, &grad, &hess);

  FittedModel model;
  model.spec = spec;
  int iter = 0;
  bool converged = grad.norm() <= spec.tol;
  while (!converged && iter < spec.max_iter) {
    ++iter;
    // Damped Newton direction; bump the damping until it points downhill.
    double mu = 0.0;
    Eigen::VectorXd dir;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd damped = hess;
      damped.diagonal().array() += mu;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      if (ldlt.info() == Eigen::Success) {
        dir = ldlt.solve(-grad);
        if (dir.dot(grad) < 0) break;
      }
      mu = mu == 0.0 ? 1e-8 + 1e-4 * hess.trace() / dim : mu * 10.0;
      dir.resize(0);
    }
    if (dir.size() == 0) dir = -grad;

    // Armijo backtracking.
    const double slope = grad.dot(dir);
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h < 50; ++h) {
      const Eigen::VectorXd trial = v + alpha * dir;
      const double f_trial = eval(trial, nullptr, nullptr);
      if (f_trial <= f + 1e-4 * alpha * slope) {
        v = trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    f = eval(v, &grad, &hess);
    converged = grad.norm() <= spec.tol;
  }

  model.weights = v;
  model.iterations = iter;
  model.final_grad_norm = grad.norm();
  model.converged = converged;
  return model;
}

}  // namespace

FittedModel fit(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& y) {
  check_shapes(X, y);
  if (spec.reg_strength < 0) {
    fail(errc::invalid_config, "reg_strength must be >= 0");
  }
  if (spec.kind == LearnerKind::ridge) return fit_ridge(spec, X, y);
  return fit_margin(spec, X, y);
}

Eigen::VectorXd predict_scores(const FittedModel& model,
                               const Eigen::MatrixXd& X) {
  if (X.cols() + 1 != model.weights.size()) {
    fail(errc::dimension_mismatch,
         "model was fit on " + std::to_string(model.weights.size() - 1) +
             " features, given " + std::to_string(X.cols()));
  }
  return (X * model.weights.tail(X.cols())).array() + model.weights[0];
}

double objective(const LearnerSpec& spec, const Eigen::VectorXd& weights,
                 const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::VectorXd scores =
      (X * weights.tail(X.cols())).array() + weights[0];
  double f = 0.0;
  const LossKind loss = training_loss(spec.kind);
  for (Index i = 0; i < X.rows(); ++i) {
    f += loss_value(loss, scores[i], y[i]);
  }
  f /= static_cast<double>(X.rows());
  f += spec.reg_strength * weights.tail(weights.size() - 1).squaredNorm();
  return f;
}

Eigen::VectorXd objective_gradient(const LearnerSpec& spec,
                                   const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y) {
  const Index dim = weights.size();
  const Eigen::MatrixXd Xa = augment(X);
  const Eigen::VectorXd scores = Xa * weights;
  const double inv_n = 1.0 / static_cast<double>(X.rows());
  Eigen::VectorXd dscore(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    if (spec.kind == LearnerKind::ridge) {
      dscore[i] = 2.0 * (scores[i] - y[i]);
    } else {
      dscore[i] = margin_terms(spec.kind, scores[i], y[i]).dscore;
    }
  }
  Eigen::VectorXd grad = inv_n * (Xa.transpose() * dscore);
  grad.tail(dim - 1) += 2.0 * spec.reg_strength * weights.tail(dim - 1);
  return grad;
}

double loss_value(LossKind loss, double score, double label) {
  switch (loss) {
    case LossKind::squared_error: {
      const double r = score - label;
      return r * r;
    }
    case LossKind::log_loss:
      return softplus(-label * score);
    case LossKind::squared_hinge: {
      const double slack = std::max(0.0, 1.0 - label * score);
      return slack * slack;
    }
    case LossKind::zero_one: {
      const double pred = score >= 0 ? 1.0 : -1.0;
      const double truth = label >= 0 ? 1.0 : -1.0;
      return pred == truth ? 0.0 : 1.0;
    }
  }
  fail(errc::invalid_config, "unknown loss");
}

double empirical_loss(const FittedModel& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, LossKind loss) {
  if (X.rows() == 0) {
    fail(errc::empty_dataset, "cannot evaluate loss on zero rows");
  }
  const Eigen::VectorXd scores = predict_scores(model, X);
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    total += loss_value(loss, scores[i], y[i]);
  }
  return total / static_cast<double>(X.rows());
}

const char* learner_name(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::ridge: return "ridge";
    case LearnerKind::logistic_l2: return "logistic-l2";
    case LearnerKind::squared_hinge_l2: return "squared-hinge-l2";
  }
  return "unknown";
}

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::squared_error: return "squared-error";
    case LossKind::log_loss: return "log-loss";
    case LossKind::squared_hinge: return "squared-hinge";
    case LossKind::zero_one: return "zero-one";
  }
  return "unknown";
}

LearnerKind learner_from_name(const std::string& name) {
  if (name == "ridge") return LearnerKind::ridge;
  if (name == "logistic-l2") return LearnerKind::logistic_l2;
  if (name == "squared-hinge-l2") return LearnerKind::squared_hinge_l2;
  fail(errc::invalid_config, "unknown learner '" + name + "'");
}

LossKind loss_from_name(const std::string& name) {
  if (name == "squared-error") return LossKind::squared_error;
  if (name == "log-loss") return LossKind::log_loss;
  if (name == "squared-hinge") return LossKind::squared_hinge;
  if (name == "zero-one") return LossKind::zero_one;
  fail(errc::invalid_config, "unknown loss '" + name + "'");
}

LossKind training_loss(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::ridge: return LossKind::squared_error;
    case LearnerKind::logistic_l2: return LossKind::log_loss;
    case LearnerKind::squared_hinge_l2: return LossKind::squared_hinge;
  }
  return LossKind::squared_error;
}

}  // namespace ooc
