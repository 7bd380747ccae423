#pragma once

#include <string>

#include "ooc/dataset.hpp"

namespace ooc {

/// Loads a dataset from CSV.  One column holds labels, one holds cluster
/// ids, the rest are features.  Cluster cells may be arbitrary strings; they
/// are remapped to 1..k in order of first appearance.  `approx_column` names
/// an optional second cluster assignment ("" looks for "approx_cluster" and
/// skips it silently when absent).
ClusteredDataset load_csv(const std::string& path,
                          const std::string& label_column = "label",
                          const std::string& cluster_column = "cluster",
                          const std::string& approx_column = "");

/// Writes a dataset as CSV: features in order, then label, cluster and (when
/// present) the approximate cluster column.  Numbers use %.17g so that
/// load(save(x)) reproduces x exactly.
void save_csv(const ClusteredDataset& data, const std::string& path);

/// %.17g rendering used for every floating-point value we serialize.
std::string format_double(double value);

}  // namespace ooc
