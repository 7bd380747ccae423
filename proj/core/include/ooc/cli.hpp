#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "ooc/bench.hpp"
#include "ooc/dataset.hpp"
#include "ooc/estimators.hpp"
#include "ooc/learners.hpp"

namespace ooc {

/// How the corrupted split handed to an estimator or test arises.
enum class LeakMode {
  none,    // clean split, p0 = 0
  inject,  // move rows across the split at the configured p0
  assume,  // split is already contaminated; record the known p0
};

struct DatasetOptions {
  std::string path;  // empty -> simulate from `model`
  std::string label_column = "label";
  std::string cluster_column = "cluster";
  std::string approx_column;  // "" auto-detects "approx_cluster"
  PartitionModelConfig model;
};

struct EstimateOptions {
  std::string method = "b3-exact";  // iid, loco, b3-exact, b3-t4mono,
                                    // b3-basis, b3-sketch
  double p0 = 0.1;
  LeakMode leak = LeakMode::inject;
  LeakDirection direction = LeakDirection::valid_to_train;
  int held_out_cluster = 1;
  bool use_approx = false;
  int folds = 5;  // naive IID cross-validation
  B3Config b3;    // learner/loss/seed/threads filled from the run
};

struct SweepOptions {
  int points = 11;
  double min_p0 = 0.0;
  double max_p0 = 0.9;
  int trials = 50;
  int held_out_cluster = 1;
  bool use_approx = false;
  LeakDirection direction = LeakDirection::valid_to_train;
};

struct TestOptions {
  TTestConfig ttest;  // learner/loss/seed filled from the run
  double p0 = 0.2;
  LeakMode leak = LeakMode::inject;
  LeakDirection direction = LeakDirection::valid_to_train;
  int held_out_cluster = 1;
  bool use_approx = false;
};

struct SimulateOptions {
  int oracle_reps = 50;
  Index oracle_train = 0;  // 0 -> model.n_train
  Index oracle_eval = 0;   // 0 -> model.n_valid
};

/// Fully resolved run configuration.  `out` and `threads` steer execution
/// only and are left out of report echoes so reports do not depend on where
/// or how parallel a run happened.
struct RunConfig {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = ".";
  DatasetOptions dataset;
  LearnerSpec learner;
  LossKind loss = LossKind::squared_error;
  EstimateOptions estimate;
  SweepOptions sweep;
  TestOptions test;
  SimulateOptions simulate;
  BenchOptions bench;
};

/// Parses a config document, rejecting unknown keys with their path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Loads dataset.path, or materializes the partition model (seeded by
/// cfg.seed) when no path is set.
ClusteredDataset load_or_simulate(const RunConfig& cfg);

/// Mean corrupted-validation loss per sweep level: at each p0, leakage is
/// injected `trials` times, the learner is refit on the full corrupted
/// T-hat and scored on what remains of V-hat.
struct SweepCurve {
  Eigen::VectorXd levels;
  Eigen::VectorXd means;
  Eigen::VectorXd stderrs;
};
SweepCurve run_sweep(const ClusteredDataset& data, const SplitPair& split,
                     const SweepOptions& opt, const LearnerSpec& learner,
                     LossKind loss, std::uint64_t seed, int threads);

/// Shape diagnostics of a swept curve: distance from monotone and the
/// noise-scaled discrete convexity margin.
struct SweepDiagnostics {
  Eigen::VectorXd isotonic_fit;
  double isotonic_residual_fraction = 0.0;  // RMS(mean - fit) / range
  Eigen::VectorXd second_differences;       // interior points only
  Eigen::VectorXd second_difference_stderr;
  double min_convexity_ratio = 0.0;  // min d2/stderr; +inf when noiseless
};
SweepDiagnostics sweep_diagnostics(const SweepCurve& curve);

void cmd_simulate(const RunConfig& cfg);
void cmd_estimate(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);
void cmd_test(const RunConfig& cfg);
void cmd_bench(const RunConfig& cfg);

/// Command-line overrides that beat the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

/// Loads the config (when given), applies overrides, dispatches `command`
/// and turns any Error into a machine-readable error report plus the
/// documented exit code (0 ok, 2 config, 3 data, 4 numerical).
int run_cli(const std::string& command, const std::string& config_path,
            const CliOverrides& overrides);

}  // namespace ooc
