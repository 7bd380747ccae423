#pragma once

#include <cstdint>

#include "ooc/dataset.hpp"

namespace ooc {

/// Std-dev of the noise added to the cluster id when building the
/// memorizable column, and the ground-truth weight that column receives.
inline constexpr double kMemorizableNoiseStd = 0.05;
inline constexpr double kMemorizableWeight = 1.0;

/// Draws rows from the two cluster populations of a PartitionModelConfig.
/// The ground truth is fixed by cfg.seed, so samples drawn later (for
/// oracles) come from exactly the population the dataset was built from.
class PartitionSampler {
 public:
  explicit PartitionSampler(const PartitionModelConfig& cfg);

  /// Draws `count` rows from cluster 1 or 2 into X (count x feature_count)
  /// and y.  `stream` selects an independent substream of cfg.seed.
  void sample(int cluster, Index count, std::uint64_t stream,
              Eigen::MatrixXd* X, Eigen::VectorXd* y) const;

  /// Ground-truth weights; the last entry is the memorizable weight when
  /// that feature is enabled.
  const Eigen::VectorXd& coefficients() const { return coef_; }

  Index feature_count() const;
  const PartitionModelConfig& config() const { return cfg_; }

 private:
  PartitionModelConfig cfg_;
  Eigen::VectorXd coef_;
};

/// Materializes the synthetic dataset: cluster-1 rows first, then cluster 2.
ClusteredDataset generate_partition_model(const PartitionModelConfig& cfg);

}  // namespace ooc
