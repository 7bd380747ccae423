#include "ooc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ooc/errors.hpp"

namespace ooc {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kConditionLimit = 1e12;

// Monotone decreasing, convex curve over the corruption fraction.
double synthetic_level(double x) {
  return 1.2 * (1.0 - x) * (1.0 - x) + 0.05 * (1.0 - x) + 0.02;
}

int stage_grid_size(const BenchOptions& opt, EstimatorMethod method,
                    Index n) {
  if (opt.grid_size > 0) return opt.grid_size;
  if (method == EstimatorMethod::exact || method == EstimatorMethod::t4mono) {
    return static_cast<int>(2 * (n + 1));
  }
  return 10;
}

bool solve_failed(const SolveResult& result) {
  if (!result.converged || result.rank_deficient) return true;
  return result.condition_estimate > kConditionLimit;
}

// One inversion stage; returns whether it failed.
bool run_stage(EstimatorMethod method, Index n, const PGrid& grid,
               const Eigen::VectorXd& b, const BenchOptions& opt) {
  try {
    switch (method) {
      case EstimatorMethod::exact: {
        const BinomialDesign design = binomial_design(n, grid);
        return solve_failed(least_squares(design.matrix, b));
      }
      case EstimatorMethod::t4mono: {
        const BinomialDesign design = binomial_design(n, grid);
        return solve_failed(constrained_solve(design.matrix, b, opt.trend));
      }
      case EstimatorMethod::basis: {
        const Eigen::MatrixXd G = binomial_basis_product(n, grid, opt.basis);
        return solve_failed(least_squares(G, b));
      }
      case EstimatorMethod::sketch: {
        const BinomialDesign design = binomial_design(n, grid);
        const SketchedDesign sk = sketch_design(design, opt.sketch_k);
        TrendFilterConfig tf = opt.trend;
        tf.lambda = opt.sketch_lambda;
        return solve_failed(constrained_solve(sk.sketch, b, tf));
      }
    }
  } catch (const std::exception&) {
    return true;
  }
  return true;  // unreachable
}

}  // namespace

std::vector<BenchRow> run_solver_bench(const BenchOptions& opt) {
  if (opt.reps < 1) fail(errc::invalid_config, "bench needs reps >= 1");
  if (opt.methods.empty() || opt.sizes.empty()) {
    fail(errc::invalid_config, "bench needs at least one method and size");
  }
  for (Index n : opt.sizes) {
    if (n < 1) fail(errc::invalid_config, "bench sizes must be >= 1");
  }

  std::vector<BenchRow> rows;
  for (EstimatorMethod method : opt.methods) {
    for (Index n : opt.sizes) {
      const PGrid grid =
          uniform_pgrid(opt.p0, stage_grid_size(opt, method, n));

      // Synthesize b = A e* outside the timed region.
      const BinomialDesign design = binomial_design(n, grid);
      Eigen::VectorXd e_star(n + 1);
      for (Index j = 0; j <= n; ++j) {
        e_star[j] =
            synthetic_level(static_cast<double>(j) / static_cast<double>(n));
      }
      const Eigen::VectorXd b = design.matrix * e_star;

      BenchRow row;
      row.method = method;
      row.n_prime = n;

      std::vector<double> laps;
      laps.reserve(static_cast<size_t>(opt.reps));
      for (int rep = 0; rep < opt.reps; ++rep) {
        Clock::time_point t0 = Clock::now();
        const bool failed = run_stage(method, n, grid, b, opt);
        double lap = std::chrono::duration<double>(Clock::now() - t0).count();
        if (rep == 0) row.failed = failed;

        if (lap < opt.min_seconds) {
          const double target = std::max(opt.min_seconds, 1e-4);
          const long iters = std::clamp<long>(
              static_cast<long>(std::ceil(target / std::max(lap, 1e-9))), 1,
              1000000);
          t0 = Clock::now();
          for (long i = 0; i < iters; ++i) run_stage(method, n, grid, b, opt);
          lap = std::chrono::duration<double>(Clock::now() - t0).count() /
                static_cast<double>(iters);
        }
        laps.push_back(lap);
      }
      std::sort(laps.begin(), laps.end());
      row.seconds = laps[laps.size() / 2];
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace ooc
