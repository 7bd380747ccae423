#pragma once

#include <Eigen/Dense>
#include <string>

#include "ooc/dataset.hpp"

namespace ooc {

enum class LearnerKind { ridge, logistic_l2, squared_hinge_l2 };
enum class LossKind { squared_error, log_loss, squared_hinge, zero_one };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::ridge;
  double reg_strength = 0.1;  // lambda on the mean-loss scale
  int max_iter = 100;         // Newton iterations (iterative learners)
  double tol = 1e-8;          // gradient-norm stopping rule
};

/// Fit result.  weights[0] is the (unpenalized) intercept.  `converged`
/// means the gradient norm reached spec.tol; a false flag is diagnostic,
/// not an error.
struct FittedModel {
  Eigen::VectorXd weights;
  LearnerSpec spec;
  bool converged = false;
  double final_grad_norm = 0.0;
  int iterations = 0;
};

/// Trains the learner on (X, y).  Ridge is solved in closed form (least
/// squares on an augmented system; minimum-norm solution when reg_strength
/// is 0 and the system is rank deficient).  The margin learners run damped
/// Newton with Armijo backtracking from a zero start, so fits are
/// deterministic.  Margin learners require labels in {-1, +1}.
FittedModel fit(const LearnerSpec& spec, const Eigen::MatrixXd& X,
                const Eigen::VectorXd& y);

Eigen::VectorXd predict_scores(const FittedModel& model,
                               const Eigen::MatrixXd& X);

/// Regularized training objective: mean pointwise loss plus
/// reg_strength * ||w||^2 with the intercept left out of the penalty.
double objective(const LearnerSpec& spec, const Eigen::VectorXd& weights,
                 const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Analytic gradient of `objective` in the weights.
Eigen::VectorXd objective_gradient(const LearnerSpec& spec,
                                   const Eigen::VectorXd& weights,
                                   const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y);

/// Pointwise loss of a raw score against a label.  zero_one thresholds the
/// score at 0 with sign(0) taken as +1.
double loss_value(LossKind loss, double score, double label);

/// Mean pointwise loss of the model on (X, y); no regularizer.
double empirical_loss(const FittedModel& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, LossKind loss);

const char* learner_name(LearnerKind kind);
const char* loss_name(LossKind kind);
LearnerKind learner_from_name(const std::string& name);
LossKind loss_from_name(const std::string& name);

/// Training loss each learner minimizes.
LossKind training_loss(LearnerKind kind);

}  // namespace ooc
