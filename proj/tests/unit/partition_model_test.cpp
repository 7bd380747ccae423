#include <doctest.h>

#include <cmath>

#include "ooc/learners.hpp"
#include "ooc/estimators.hpp"
#include "ooc/partition_model.hpp"

using namespace ooc;

namespace {

PartitionModelConfig small_config(bool mem) {
  PartitionModelConfig cfg;
  cfg.n_train = 120;
  cfg.n_valid = 150;
  cfg.d = 2;
  cfg.cluster_shift = {0.1, 0.0};
  cfg.noise_std = 0.1;
  cfg.memorizable_feature = mem;
  cfg.seed = 31;
  return cfg;
}

}  // namespace

TEST_CASE("generated data has the documented layout") {
  const auto cfg = small_config(true);
  const auto data = generate_partition_model(cfg);
  data.validate();
  CHECK(data.rows() == cfg.n_train + cfg.n_valid);
  CHECK(data.cols() == cfg.d + 1);  // memorizable column appended
  for (Index i = 0; i < cfg.n_train; ++i) CHECK(data.oracle_clusters[i] == 1);
  for (Index i = cfg.n_train; i < data.rows(); ++i) {
    CHECK(data.oracle_clusters[i] == 2);
  }
  CHECK(data.feature_names.size() == static_cast<size_t>(data.cols()));
}

TEST_CASE("generation is deterministic in the seed") {
  const auto cfg = small_config(false);
  const auto a = generate_partition_model(cfg);
  const auto b = generate_partition_model(cfg);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);

  auto cfg2 = cfg;
  cfg2.seed = 32;
  CHECK(generate_partition_model(cfg2).features != a.features);
}

TEST_CASE("memorizable column tracks the cluster id") {
  const auto data = generate_partition_model(small_config(true));
  const Index mem = data.cols() - 1;
  for (Index i = 0; i < data.rows(); ++i) {
    CHECK(std::abs(data.features(i, mem) - data.oracle_clusters[i]) < 0.5);
  }
}

TEST_CASE("labels follow the linear ground truth up to noise") {
  const auto cfg = small_config(true);
  const PartitionSampler sampler(cfg);
  const auto data = generate_partition_model(cfg);
  const Eigen::VectorXd residual =
      data.labels - data.features * sampler.coefficients();
  const double sd = std::sqrt(residual.squaredNorm() / data.rows());
  CHECK(sd > 0.5 * cfg.noise_std);
  CHECK(sd < 2.0 * cfg.noise_std);
}

TEST_CASE("generate and the sampler draw the same population streams") {
  const auto cfg = small_config(true);
  const PartitionSampler sampler(cfg);
  const auto data = generate_partition_model(cfg);
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  sampler.sample(1, cfg.n_train, 0, &X, &y);
  CHECK(X == data.features.topRows(cfg.n_train));
  CHECK(y == data.labels.head(cfg.n_train));
  sampler.sample(2, cfg.n_valid, 0, &X, &y);
  CHECK(X == data.features.bottomRows(cfg.n_valid));
}

TEST_CASE("sampler streams are independent") {
  const auto cfg = small_config(false);
  const PartitionSampler sampler(cfg);
  Eigen::MatrixXd X0, X1;
  Eigen::VectorXd y0, y1;
  sampler.sample(1, 10, 0, &X0, &y0);
  sampler.sample(1, 10, 1, &X1, &y1);
  CHECK(X0 != X1);
}

TEST_CASE("classification labels are signs") {
  auto cfg = small_config(false);
  cfg.task = Task::classification;
  const auto data = generate_partition_model(cfg);
  for (Index i = 0; i < data.rows(); ++i) {
    CHECK((data.labels[i] == 1.0 || data.labels[i] == -1.0));
  }
}

TEST_CASE("oracle loss is small for exchangeable clusters, large with a "
          "memorizable column") {
  auto plain = small_config(false);
  plain.cluster_shift = {0.0, 0.0};
  const auto easy = partition_oracle_e0(plain, LearnerSpec{},
                                        LossKind::squared_error, 120, 150,
                                        10, 5);
  CHECK(easy.value > 0.0);
  CHECK(easy.value < 0.05);  // ~ noise_std^2 plus estimation error
  CHECK(easy.std_error > 0.0);
  CHECK(easy.reps == 10);

  const auto hard = partition_oracle_e0(small_config(true), LearnerSpec{},
                                        LossKind::squared_error, 120, 150,
                                        10, 5);
  CHECK(hard.value > 0.3);  // memorized column misleads across clusters
}
