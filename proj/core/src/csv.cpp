#include "ooc/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "ooc/errors.hpp"

namespace ooc {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, Index row,
                    const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || static_cast<size_t>(end - begin) != cell.size()) {
    fail(errc::non_finite_value, "row " + std::to_string(row) + ", column '" +
                                     column + "': cannot parse '" + cell +
                                     "' as a number");
  }
  return v;
}

}  // namespace

ClusteredDataset load_csv(const std::string& path,
                          const std::string& label_column,
                          const std::string& cluster_column,
                          const std::string& approx_column) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) fail(errc::empty_dataset, path + " is empty");
  const std::vector<std::string> header = split_line(line);

  int label_idx = -1, cluster_idx = -1, approx_idx = -1;
  const std::string approx_name =
      approx_column.empty() ? "approx_cluster" : approx_column;
  std::vector<int> feature_idx;
  std::vector<std::string> feature_names;
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_idx = static_cast<int>(j);
    } else if (header[j] == cluster_column) {
      cluster_idx = static_cast<int>(j);
    } else if (header[j] == approx_name) {
      approx_idx = static_cast<int>(j);
    } else {
      feature_idx.push_back(static_cast<int>(j));
      feature_names.push_back(header[j]);
    }
  }
  if (label_idx < 0) {
    fail(errc::missing_column, "no '" + label_column + "' column in " + path);
  }
  if (cluster_idx < 0) {
    fail(errc::missing_column,
         "no '" + cluster_column + "' column in " + path);
  }
  if (!approx_column.empty() && approx_idx < 0) {
    fail(errc::missing_column,
         "no '" + approx_column + "' column in " + path);
  }

  std::vector<std::vector<double>> feature_rows;
  std::vector<double> labels;
  std::vector<int> clusters, approx;
  std::map<std::string, int> cluster_map, approx_map;
  auto remap = [](std::map<std::string, int>& m, const std::string& key) {
    auto [it, inserted] = m.emplace(key, static_cast<int>(m.size()) + 1);
    (void)inserted;
    return it->second;
  };

  Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      fail(errc::dimension_mismatch,
           "row " + std::to_string(row + 1) + " has " +
               std::to_string(cells.size()) + " cells, expected " +
               std::to_string(header.size()));
    }
    std::vector<double> feats(feature_idx.size());
    for (size_t j = 0; j < feature_idx.size(); ++j) {
      feats[j] = parse_double(cells[feature_idx[j]], row, feature_names[j]);
    }
    feature_rows.push_back(std::move(feats));
    labels.push_back(parse_double(cells[label_idx], row, label_column));
    clusters.push_back(remap(cluster_map, cells[cluster_idx]));
    if (approx_idx >= 0) approx.push_back(remap(approx_map, cells[approx_idx]));
    ++row;
  }
  if (row == 0) fail(errc::empty_dataset, path + " has a header but no rows");

  ClusteredDataset data;
  data.features.resize(row, static_cast<Index>(feature_idx.size()));
  data.labels.resize(row);
  for (Index i = 0; i < row; ++i) {
    for (Index j = 0; j < data.features.cols(); ++j) {
      data.features(i, j) = feature_rows[i][j];
    }
    data.labels[i] = labels[i];
  }
  data.oracle_clusters = std::move(clusters);
  if (approx_idx >= 0) data.approx_clusters = std::move(approx);
  data.feature_names = std::move(feature_names);
  data.label_name = label_column;
  data.cluster_name = cluster_column;
  data.approx_name = approx_name;
  data.validate();
  return data;
}

void save_csv(const ClusteredDataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot open '" + path + "' for writing");

  for (Index j = 0; j < data.cols(); ++j) {
    const std::string name = static_cast<Index>(data.feature_names.size()) ==
                                     data.cols()
                                 ? data.feature_names[j]
                                 : "x" + std::to_string(j);
    out << name << ',';
  }
  out << data.label_name << ',' << data.cluster_name;
  if (data.approx_clusters) out << ',' << data.approx_name;
  out << '\n';

  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) {
      out << format_double(data.features(i, j)) << ',';
    }
    out << format_double(data.labels[i]) << ',' << data.oracle_clusters[i];
    if (data.approx_clusters) out << ',' << (*data.approx_clusters)[i];
    out << '\n';
  }
  if (!out) fail(errc::io_failure, "write to '" + path + "' failed");
}

}  // namespace ooc
