#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ooc/bench.hpp"
#include "ooc/estimators.hpp"

namespace ooc {

inline constexpr char kReportSchema[] = "ooc-report/1";
inline constexpr char kArtifactVersion[] = "0.1.0";

/// Shortest decimal string that parses back to exactly `v`.
std::string format_number(double v);

/// `level,p,p_prime,b_bar` rows of a collected bootstrap curve.
std::string curve_csv(const BootstrapTrace& trace);

/// `p0,mean,stderr` rows of a leakage sweep.
std::string sweep_csv(const Eigen::VectorXd& levels,
                      const Eigen::VectorXd& means,
                      const Eigen::VectorXd& stderrs);

/// `method,n_prime,seconds,failed` rows of a solver benchmark.
std::string bench_csv(const std::vector<BenchRow>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ooc
