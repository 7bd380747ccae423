#pragma once

#include <vector>

#include "ooc/estimators.hpp"

namespace ooc {

struct BenchOptions {
  std::vector<EstimatorMethod> methods{
      EstimatorMethod::exact, EstimatorMethod::t4mono, EstimatorMethod::basis,
      EstimatorMethod::sketch};
  std::vector<Index> sizes{100, 1000};  // resample sizes n'
  int reps = 3;              // timed repetitions; the median is reported
  double min_seconds = 0.1;  // short stages loop until at least this long
  double p0 = 0.1;
  int grid_size = 0;  // 0 -> per-method default (2(n'+1) or 10)
  TrendFilterConfig trend;
  BasisSpec basis;
  int sketch_k = 7;
  double sketch_lambda = 0.01;
};

struct BenchRow {
  EstimatorMethod method = EstimatorMethod::exact;
  Index n_prime = 0;
  double seconds = 0.0;
  bool failed = false;
};

/// Times the inversion stage alone -- design / sketch / moment construction
/// plus the solve -- on a synthetic monotone convex curve, excluding the
/// bootstrap fits.  A row is flagged failed when the stage throws, the
/// solver does not converge, or the factorization reports rank deficiency
/// or a blown-up condition number.
std::vector<BenchRow> run_solver_bench(const BenchOptions& opt);

}  // namespace ooc
