#include "ooc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ooc/errors.hpp"

namespace ooc {

int ClusteredDataset::cluster_count() const {
  int k = 0;
  for (int c : oracle_clusters) k = std::max(k, c);
  return k;
}

namespace {

void check_contiguous(const std::vector<int>& ids, const std::string& name) {
  std::set<int> seen(ids.begin(), ids.end());
  if (seen.empty()) return;
  if (*seen.begin() < 1) {
    fail(errc::invalid_labels, name + " ids must be >= 1");
  }
  int expect = 1;
  for (int c : seen) {
    if (c != expect) {
      fail(errc::invalid_labels,
           name + " ids must be contiguous 1..k; missing id " +
               std::to_string(expect));
    }
    ++expect;
  }
}

}  // namespace

void ClusteredDataset::validate() const {
  const Index n = features.rows();
  if (n == 0) fail(errc::empty_dataset, "dataset has no rows");
  if (labels.size() != n) {
    fail(errc::dimension_mismatch, "labels size " +
                                       std::to_string(labels.size()) +
                                       " != row count " + std::to_string(n));
  }
  if (static_cast<Index>(oracle_clusters.size()) != n) {
    fail(errc::dimension_mismatch, "cluster assignment size mismatch");
  }
  if (approx_clusters &&
      static_cast<Index>(approx_clusters->size()) != n) {
    fail(errc::dimension_mismatch, "approx cluster assignment size mismatch");
  }
  if (!feature_names.empty() &&
      static_cast<Index>(feature_names.size()) != features.cols()) {
    fail(errc::dimension_mismatch, "feature name count mismatch");
  }
  if (!features.allFinite()) {
    fail(errc::non_finite_value, "non-finite feature value");
  }
  if (!labels.allFinite()) {
    fail(errc::non_finite_value, "non-finite label value");
  }
  check_contiguous(oracle_clusters, "cluster");
  if (approx_clusters) check_contiguous(*approx_clusters, "approx cluster");
}

}  // namespace ooc
