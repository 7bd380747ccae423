#include "ooc/errors.hpp"

namespace ooc {

const char* errc_name(errc code) {
  switch (code) {
    case errc::invalid_config: return "invalid_config";
    case errc::grid_too_small: return "grid_too_small";
    case errc::missing_column: return "missing_column";
    case errc::non_finite_value: return "non_finite_value";
    case errc::invalid_labels: return "invalid_labels";
    case errc::empty_dataset: return "empty_dataset";
    case errc::degenerate_split: return "degenerate_split";
    case errc::empty_pool: return "empty_pool";
    case errc::insufficient_data: return "insufficient_data";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::io_failure: return "io_failure";
    case errc::singular_system: return "singular_system";
    case errc::rank_deficient: return "rank_deficient";
    case errc::no_convergence: return "no_convergence";
    case errc::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

int exit_code_for(errc code) {
  switch (code) {
    case errc::invalid_config:
    case errc::grid_too_small:
      return 2;
    case errc::missing_column:
    case errc::non_finite_value:
    case errc::invalid_labels:
    case errc::empty_dataset:
    case errc::degenerate_split:
    case errc::empty_pool:
    case errc::insufficient_data:
    case errc::dimension_mismatch:
    case errc::io_failure:
      return 3;
    case errc::singular_system:
    case errc::rank_deficient:
    case errc::no_convergence:
    case errc::numerical_failure:
      return 4;
  }
  return 1;
}

}  // namespace ooc
