#include "ooc/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ooc/design.hpp"
#include "ooc/errors.hpp"

namespace ooc {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string curve_csv(const BootstrapTrace& trace) {
  std::ostringstream out;
  out << "level,p,p_prime,b_bar\n";
  for (int i = 0; i < trace.grid.size(); ++i) {
    const double p = trace.grid.levels[i];
    out << i << ',' << format_number(p) << ','
        << format_number(corruption_level(p, trace.grid.p0)) << ','
        << format_number(trace.b_bar[i]) << '\n';
  }
  return out.str();
}

std::string sweep_csv(const Eigen::VectorXd& levels,
                      const Eigen::VectorXd& means,
                      const Eigen::VectorXd& stderrs) {
  if (levels.size() != means.size() || levels.size() != stderrs.size()) {
    fail(errc::dimension_mismatch, "sweep columns differ in length");
  }
  std::ostringstream out;
  out << "p0,mean,stderr\n";
  for (Index i = 0; i < levels.size(); ++i) {
    out << format_number(levels[i]) << ',' << format_number(means[i]) << ','
        << format_number(stderrs[i]) << '\n';
  }
  return out.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "method,n_prime,seconds,failed\n";
  for (const BenchRow& row : rows) {
    out << method_name(row.method) << ',' << row.n_prime << ','
        << format_number(row.seconds) << ',' << (row.failed ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_failure, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(errc::io_failure, "write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(errc::io_failure, "read from '" + path + "' failed");
  return buf.str();
}

}  // namespace ooc
