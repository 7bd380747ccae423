#pragma once

#include <cstdint>
#include <vector>

#include "ooc/dataset.hpp"

namespace ooc {

/// Leave-one-cluster-out split: T-hat = rows outside `held_out_cluster`,
/// V-hat = rows inside it.  With use_approx the approximate assignment is
/// used instead of the oracle one.
SplitPair loco_split(const ClusteredDataset& data, int held_out_cluster,
                     bool use_approx = false);

/// Moves each source-side row across the split independently with
/// probability cfg.p0 (source = valid for valid_to_train and vice versa).
/// The result records the moved rows and carries p0 forward as the nominal
/// contamination level.
CorruptedSplit inject_leakage(const SplitPair& split,
                              const LeakageConfig& cfg);

/// Wraps a clean split as a CorruptedSplit with an externally known
/// contamination level (nothing is moved; p0 is simply recorded).
CorruptedSplit assume_contamination(const SplitPair& split, double p0);

/// Draws `out_size` indices with replacement from the two pools: each draw
/// takes the leak pool with probability p_prime, the train pool otherwise.
/// A pool may only be empty if its mixture weight is zero.
std::vector<Index> mixture_resample(const std::vector<Index>& train_pool,
                                    const std::vector<Index>& leak_pool,
                                    double p_prime, Index out_size,
                                    std::uint64_t seed);

}  // namespace ooc
