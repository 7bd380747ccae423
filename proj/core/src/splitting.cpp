#include "ooc/splitting.hpp"

#include <string>

#include "ooc/errors.hpp"
#include "ooc/rng.hpp"

namespace ooc {

SplitPair loco_split(const ClusteredDataset& data, int held_out_cluster,
                     bool use_approx) {
  data.validate();
  if (use_approx && !data.approx_clusters) {
    fail(errc::missing_column, "dataset has no approximate clustering");
  }
  const std::vector<int>& ids =
      use_approx ? *data.approx_clusters : data.oracle_clusters;
  SplitPair split;
  for (Index i = 0; i < data.rows(); ++i) {
    if (ids[static_cast<size_t>(i)] == held_out_cluster) {
      split.valid.push_back(i);
    } else {
      split.train.push_back(i);
    }
  }
  if (split.valid.empty()) {
    fail(errc::degenerate_split, "held-out cluster " +
                                     std::to_string(held_out_cluster) +
                                     " has no rows");
  }
  if (split.train.empty()) {
    fail(errc::degenerate_split, "no rows left outside cluster " +
                                     std::to_string(held_out_cluster));
  }
  return split;
}

CorruptedSplit inject_leakage(const SplitPair& split,
                              const LeakageConfig& cfg) {
  if (cfg.p0 < 0.0 || cfg.p0 > 1.0) {
    fail(errc::invalid_config, "leakage p0 must lie in [0, 1]");
  }
  const bool from_valid = cfg.direction == LeakDirection::valid_to_train;
  const std::vector<Index>& source = from_valid ? split.valid : split.train;
  const std::vector<Index>& target = from_valid ? split.train : split.valid;

  CorruptedSplit out;
  out.p0 = cfg.p0;
  std::vector<Index> stay;
  stay.reserve(source.size());
  Rng rng(derive_seed(cfg.seed, {0x1eafULL}));
  for (Index row : source) {
    if (rng.uniform01() < cfg.p0) {
      out.moved.push_back(row);
    } else {
      stay.push_back(row);
    }
  }
  std::vector<Index> grown = target;
  grown.insert(grown.end(), out.moved.begin(), out.moved.end());
  if (from_valid) {
    out.train = std::move(grown);
    out.valid = std::move(stay);
  } else {
    out.train = std::move(stay);
    out.valid = std::move(grown);
  }
  return out;
}

CorruptedSplit assume_contamination(const SplitPair& split, double p0) {
  if (p0 < 0.0 || p0 >= 1.0) {
    fail(errc::invalid_config, "assumed contamination must lie in [0, 1)");
  }
  CorruptedSplit out;
  out.train = split.train;
  out.valid = split.valid;
  out.p0 = p0;
  return out;
}

std::vector<Index> mixture_resample(const std::vector<Index>& train_pool,
                                    const std::vector<Index>& leak_pool,
                                    double p_prime, Index out_size,
                                    std::uint64_t seed) {
  if (p_prime < 0.0 || p_prime > 1.0) {
    fail(errc::invalid_config, "mixture weight must lie in [0, 1]");
  }
  if (p_prime > 0.0 && leak_pool.empty()) {
    fail(errc::empty_pool, "leak pool is empty but has positive weight");
  }
  if (p_prime < 1.0 && train_pool.empty()) {
    fail(errc::empty_pool, "train pool is empty but has positive weight");
  }
  std::vector<Index> out;
  out.reserve(static_cast<size_t>(out_size));
  Rng rng(seed);
  for (Index i = 0; i < out_size; ++i) {
    // Draw order is fixed (coin, then index) so sequences are reproducible.
    const bool take_leak = rng.uniform01() < p_prime;
    const std::vector<Index>& pool = take_leak ? leak_pool : train_pool;
    out.push_back(pool[rng.below(pool.size())]);
  }
  return out;
}

}  // namespace ooc
