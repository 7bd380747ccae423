#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ooc/dataset.hpp"
#include "ooc/design.hpp"
#include "ooc/learners.hpp"
#include "ooc/solvers.hpp"

namespace ooc {

/// Inversion backend used on the collected bootstrap curve.
enum class EstimatorMethod { exact, t4mono, basis, sketch };

const char* method_name(EstimatorMethod method);
EstimatorMethod method_from_name(const std::string& name);

struct B3Config {
  Index n_prime = 15;  // resample (training) size
  int t = 1000;        // bootstrap resamples per grid level
  PGrid grid;          // empty levels -> uniform grid of resolve_grid_size()
  int grid_size = 0;   // used when grid is empty; 0 picks the solver default:
                       // 2 * (n_prime + 1) for exact/t4mono, 10 otherwise
  EstimatorMethod solver = EstimatorMethod::exact;
  TrendFilterConfig trend;      // t4mono path (order 4, monotone by default)
  double sketch_lambda = 0.01;  // penalty used on the sketched system
  BasisSpec basis;              // basis path (chebyshev, degree 2)
  int sketch_k = 7;
  LearnerSpec learner;
  LossKind loss = LossKind::squared_error;
  std::uint64_t seed = 0;
  int threads = 0;
  int redraw_limit = 10;  // retries when a trial consumes all of V-hat
};

/// Collected bootstrap curve: per-trial corrupted-training losses and their
/// per-level means.
struct BootstrapTrace {
  PGrid grid;
  Eigen::VectorXd b_bar;              // mean of each per_level_losses row
  Eigen::MatrixXd per_level_losses;   // m x t; NaN marks an abandoned trial
  long fit_failures = 0;              // trials dropped after redraw_limit
  Eigen::VectorXi trial_counts;       // finite entries per level
  Index n_prime = 0;
  long nonconverged_fits = 0;  // fits that ended with converged == false
};

/// Estimate of the loss-vs-contamination curve and its value at zero.
struct LossCurveEstimate {
  double e0_hat = 0.0;
  Eigen::VectorXd curve;         // e_k for k = 0..n'; expanded for sketch
  Eigen::VectorXd coefficients;  // basis path only
  double residual = 0.0;         // solver residual norm
  EstimatorMethod method = EstimatorMethod::exact;
  SolveResult solve;
  double error_bound = 0.0;  // sketch path only
  BootstrapTrace trace;
};

/// Number of grid levels a config resolves to.
int resolve_grid_size(const B3Config& cfg);

/// Runs the bootstrap stage: for every level p_i, draws `t` training
/// multisets of size n_prime from the (1 - p') T-hat + p' V-hat mixture with
/// p' = corruption_level(p_i, corrupted.p0), fits the learner on each, and
/// records the mean loss on the unused part of V-hat.  Trial (i, j) uses a
/// seed derived from (cfg.seed, i, j, attempt), so results do not depend on
/// the thread count.
BootstrapTrace b3_collect(const CorruptedSplit& corrupted,
                          const ClusteredDataset& data, const B3Config& cfg);

/// Inverts the collected curve with the configured backend.
LossCurveEstimate b3_estimate(const BootstrapTrace& trace,
                              const B3Config& cfg);

/// b3_collect followed by b3_estimate.
LossCurveEstimate b3_run(const CorruptedSplit& corrupted,
                         const ClusteredDataset& data, const B3Config& cfg);

/// K-fold cross-validation that ignores clusters entirely (the estimator
/// whose optimism the rest of the library exists to correct).
double estimate_naive_iid(const ClusteredDataset& data,
                          const LearnerSpec& learner, LossKind loss,
                          int folds, std::uint64_t seed);

/// Fit on T-hat, evaluate on V-hat, using oracle clusters or (with
/// use_approx) the approximate assignment.
double estimate_loco(const ClusteredDataset& data, bool use_approx,
                     const LearnerSpec& learner, LossKind loss,
                     int held_out_cluster = 1);

/// Monte Carlo ground truth for the partition model: average loss of the
/// learner trained on `train_size` fresh cluster-1 draws and evaluated on
/// `eval_size` fresh cluster-2 draws, over `reps` repetitions.
struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int reps = 0;
};
OracleEstimate partition_oracle_e0(const PartitionModelConfig& model,
                                   const LearnerSpec& learner, LossKind loss,
                                   Index train_size, Index eval_size,
                                   int reps, std::uint64_t seed);

/// Fold layout for the dependency-leakage test.
struct TTestConfig {
  int n_T = 10;          // folds trained on T-hat draws
  int n_T_prime = 10;    // folds trained on V-hat draws
  Index fold_train = 0;  // training rows per fold; 0 = auto
  Index fold_valid = 0;  // validation rows per fold; 0 = auto
  double alpha = 0.05;
  LearnerSpec learner;
  LossKind loss = LossKind::squared_error;
  std::uint64_t seed = 0;
};

struct TestFolds {
  std::vector<std::vector<Index>> train_T;  // n_T training index sets
  std::vector<std::vector<Index>> train_V;  // n_T_prime training index sets
  std::vector<std::vector<Index>> valid_T;  // validation sets for train_T
  std::vector<std::vector<Index>> valid_V;  // validation sets for train_V
  Index fold_train = 0;
  Index fold_valid = 0;
};

/// Carves disjoint training and validation folds out of a corrupted split:
/// n_T training folds of n_prime rows from T-hat, n_T_prime training folds
/// of n_prime rows from V-hat, and one disjoint n_V-row validation fold from
/// V-hat for each of them.  Throws insufficient_data (reporting the largest
/// feasible fold counts) when the split cannot cover the request.
TestFolds make_test_folds(const CorruptedSplit& corrupted, Index n_prime,
                          int n_T, int n_T_prime, Index n_V,
                          std::uint64_t seed);

/// As above with fold sizes resolved from the config; fold_train and
/// fold_valid of 0 pick the largest sizes the split supports.
TestFolds make_test_folds(const CorruptedSplit& corrupted,
                          const TTestConfig& cfg);

/// Outcome of the one-sided two-sample comparison.
struct TestResult {
  double t_stat = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  std::pair<double, double> z_means{0.0, 0.0};  // (mean z, mean z')
  std::pair<double, double> z_vars{0.0, 0.0};   // sample variances
  std::pair<int, int> fold_counts{0, 0};        // (|z|, |z'|)
};

/// One-sided Welch t-test of mean(z) > mean(z_prime) with
/// Welch-Satterthwaite degrees of freedom.  When both samples are constant
/// and equal the comparison carries no evidence: p_value 1, no rejection.
TestResult leakage_ttest(const std::vector<double>& z,
                         const std::vector<double>& z_prime, double alpha);

/// Full dependency-leakage test: builds folds, computes the two loss
/// samples (folds trained on T-hat vs folds trained on V-hat, all evaluated
/// on held-out V-hat rows) and Welch-tests whether T-hat-trained folds lose
/// significantly more.  Under an exchangeable split both fold families see
/// the same distribution, so a rejection flags cross-cluster structure that
/// invalidates the naive pooled estimate.
TestResult leakage_test(const ClusteredDataset& data,
                        const CorruptedSplit& corrupted,
                        const TTestConfig& cfg);

}  // namespace ooc
