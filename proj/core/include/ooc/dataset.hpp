#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ooc {

using Index = Eigen::Index;

enum class Task { regression, classification };

/// Feature matrix with labels and one cluster id per row.  Cluster ids are
/// contiguous integers 1..k.  `approx_clusters`, when present, is a second
/// assignment of the same rows modelling an imperfect clustering.
struct ClusteredDataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // n
  std::vector<int> oracle_clusters;
  std::optional<std::vector<int>> approx_clusters;

  // Column names kept so CSV round trips are lossless.
  std::vector<std::string> feature_names;
  std::string label_name = "label";
  std::string cluster_name = "cluster";
  std::string approx_name = "approx_cluster";

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }
  int cluster_count() const;

  /// Checks shapes, finiteness and cluster-id contiguity; throws Error on
  /// violation.
  void validate() const;
};

/// Row indices of a clean train/validation split.
struct SplitPair {
  std::vector<Index> train;  // T-hat
  std::vector<Index> valid;  // V-hat
};

enum class LeakDirection { valid_to_train, train_to_valid };

struct LeakageConfig {
  double p0 = 0.1;  // per-row move probability
  LeakDirection direction = LeakDirection::valid_to_train;
  std::uint64_t seed = 0;
};

/// A split after dependency leakage: `moved` lists the rows that switched
/// sides and `p0` records the nominal contamination level of the split.
struct CorruptedSplit {
  std::vector<Index> train;  // T-hat, includes the moved rows
  std::vector<Index> valid;  // V-hat, moved rows removed
  std::vector<Index> moved;
  double p0 = 0.0;
};

/// Two-cluster synthetic data model.  Cluster 1 plays the training
/// population; cluster 2 is the same population with its feature mean moved
/// by `cluster_shift`.  Labels come from one fixed linear ground truth drawn
/// from `seed`.  With `memorizable_feature` on, an extra column equal to the
/// cluster id plus small noise is appended and entered into the ground truth
/// with unit weight, creating loss that only cross-cluster evaluation sees.
struct PartitionModelConfig {
  Index n_train = 450;
  Index n_valid = 500;
  Index d = 2;
  std::vector<double> cluster_shift;  // length d; empty means zero shift
  double noise_std = 0.1;             // feature and label noise scale
  bool memorizable_feature = false;
  Task task = Task::regression;
  std::uint64_t seed = 0;
};

}  // namespace ooc
