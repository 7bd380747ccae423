#include "ooc/partition_model.hpp"

#include <cmath>

#include "ooc/errors.hpp"
#include "ooc/rng.hpp"

namespace ooc {

namespace {
// Stream labels under cfg.seed.
constexpr std::uint64_t kCoefStream = 0x10;
constexpr std::uint64_t kSampleStream = 0x20;

void check_config(const PartitionModelConfig& cfg) {
  if (cfg.n_train < 1 || cfg.n_valid < 1) {
    fail(errc::invalid_config, "partition model needs n_train, n_valid >= 1");
  }
  if (cfg.d < 1) fail(errc::invalid_config, "partition model needs d >= 1");
  if (cfg.noise_std <= 0) {
    fail(errc::invalid_config, "partition model needs noise_std > 0");
  }
  if (!cfg.cluster_shift.empty() &&
      static_cast<Index>(cfg.cluster_shift.size()) != cfg.d) {
    fail(errc::invalid_config, "cluster_shift must have d entries");
  }
}
}  // namespace

PartitionSampler::PartitionSampler(const PartitionModelConfig& cfg)
    : cfg_(cfg) {
  check_config(cfg_);
  const Index dim = feature_count();
  coef_.resize(dim);
  Rng rng(derive_seed(cfg_.seed, {kCoefStream}));
  for (Index j = 0; j < cfg_.d; ++j) coef_[j] = rng.normal();
  if (cfg_.memorizable_feature) coef_[cfg_.d] = kMemorizableWeight;
}

Index PartitionSampler::feature_count() const {
  return cfg_.d + (cfg_.memorizable_feature ? 1 : 0);
}

void PartitionSampler::sample(int cluster, Index count, std::uint64_t stream,
                              Eigen::MatrixXd* X, Eigen::VectorXd* y) const {
  if (cluster != 1 && cluster != 2) {
    fail(errc::invalid_config, "partition model has clusters 1 and 2 only");
  }
  const Index dim = feature_count();
  X->resize(count, dim);
  y->resize(count);
  Rng rng(derive_seed(cfg_.seed, {kSampleStream,
                                  static_cast<std::uint64_t>(cluster),
                                  stream}));
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < cfg_.d; ++j) {
      double v = rng.normal() * cfg_.noise_std;
      if (cluster == 2 && !cfg_.cluster_shift.empty()) {
        v += cfg_.cluster_shift[j];
      }
      (*X)(i, j) = v;
    }
    if (cfg_.memorizable_feature) {
      (*X)(i, cfg_.d) = cluster + rng.normal() * kMemorizableNoiseStd;
    }
    double value = X->row(i).dot(coef_) + rng.normal() * cfg_.noise_std;
    if (cfg_.task == Task::classification) {
      value = value >= 0 ? 1.0 : -1.0;  // sign(0) := +1
    }
    (*y)[i] = value;
  }
}

ClusteredDataset generate_partition_model(const PartitionModelConfig& cfg) {
  PartitionSampler sampler(cfg);
  Eigen::MatrixXd x1, x2;
  Eigen::VectorXd y1, y2;
  sampler.sample(1, cfg.n_train, 0, &x1, &y1);
  sampler.sample(2, cfg.n_valid, 0, &x2, &y2);

  ClusteredDataset data;
  const Index n = cfg.n_train + cfg.n_valid;
  const Index dim = sampler.feature_count();
  data.features.resize(n, dim);
  data.features.topRows(cfg.n_train) = x1;
  data.features.bottomRows(cfg.n_valid) = x2;
  data.labels.resize(n);
  data.labels.head(cfg.n_train) = y1;
  data.labels.tail(cfg.n_valid) = y2;
  data.oracle_clusters.assign(static_cast<size_t>(n), 1);
  for (Index i = cfg.n_train; i < n; ++i) {
    data.oracle_clusters[static_cast<size_t>(i)] = 2;
  }
  data.feature_names.reserve(static_cast<size_t>(dim));
  for (Index j = 0; j < cfg.d; ++j) {
    data.feature_names.push_back("x" + std::to_string(j));
  }
  if (cfg.memorizable_feature) data.feature_names.push_back("mem");
  data.validate();
  return data;
}

}  // namespace ooc
