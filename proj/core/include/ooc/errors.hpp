#pragma once

#include <stdexcept>
#include <string>

namespace ooc {

/// Failure categories carried by every Error.  The CLI maps each category to
/// a process exit code, so library code should pick the most specific one.
enum class errc {
  // configuration problems (exit code 2)
  invalid_config,
  grid_too_small,
  // data problems (exit code 3)
  missing_column,
  non_finite_value,
  invalid_labels,
  empty_dataset,
  degenerate_split,
  empty_pool,
  insufficient_data,
  dimension_mismatch,
  io_failure,
  // numerical problems (exit code 4)
  singular_system,
  rank_deficient,
  no_convergence,
  numerical_failure,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

const char* errc_name(errc code);

/// Exit code the CLI uses for a given failure category:
/// 2 = configuration, 3 = data, 4 = numerical.
int exit_code_for(errc code);

}  // namespace ooc
