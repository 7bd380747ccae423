#include "ooc/estimators.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "ooc/errors.hpp"
#include "ooc/parallel.hpp"
#include "ooc/partition_model.hpp"
#include "ooc/rng.hpp"
#include "ooc/splitting.hpp"

namespace ooc {

namespace {

// Stream salts under the user seed.
constexpr std::uint64_t kCollectSalt = 0xB3;
constexpr std::uint64_t kIidSalt = 0x11D;
constexpr std::uint64_t kFoldSalt = 0xF01D;
constexpr std::uint64_t kOracleTrain = 0x0E1;
constexpr std::uint64_t kOracleEval = 0x0E2;

void gather(const ClusteredDataset& data, const std::vector<Index>& rows,
            Eigen::MatrixXd* X, Eigen::VectorXd* y) {
  X->resize(static_cast<Index>(rows.size()), data.cols());
  y->resize(static_cast<Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    X->row(static_cast<Index>(i)) = data.features.row(rows[i]);
    (*y)[static_cast<Index>(i)] = data.labels[rows[i]];
  }
}

std::vector<Index> shuffled(const std::vector<Index>& rows, Rng& rng) {
  std::vector<Index> out = rows;
  for (size_t i = out.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.below(i));
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

PGrid resolve_grid(const CorruptedSplit& corrupted, const B3Config& cfg) {
  if (cfg.grid.levels.size() == 0) {
    return uniform_pgrid(corrupted.p0, resolve_grid_size(cfg));
  }
  const PGrid& grid = cfg.grid;
  if (grid.p0 != corrupted.p0) {
    fail(errc::invalid_config,
         "configured grid starts at p0 = " + std::to_string(grid.p0) +
             " but the split is contaminated at p0 = " +
             std::to_string(corrupted.p0));
  }
  if (grid.levels.size() < 2) {
    fail(errc::grid_too_small, "grid needs at least 2 levels");
  }
  for (Index i = 0; i < grid.levels.size(); ++i) {
    const double p = grid.levels[i];
    if (p < grid.p0 || p > 1.0 || (i > 0 && p <= grid.levels[i - 1])) {
      fail(errc::invalid_config,
           "grid levels must increase strictly from p0 to at most 1");
    }
  }
  return grid;
}

}  // namespace

const char* method_name(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::exact: return "exact";
    case EstimatorMethod::t4mono: return "t4mono";
    case EstimatorMethod::basis: return "basis";
    case EstimatorMethod::sketch: return "sketch";
  }
  return "exact";
}

EstimatorMethod method_from_name(const std::string& name) {
  if (name == "exact") return EstimatorMethod::exact;
  if (name == "t4mono") return EstimatorMethod::t4mono;
  if (name == "basis") return EstimatorMethod::basis;
  if (name == "sketch") return EstimatorMethod::sketch;
  fail(errc::invalid_config,
       "unknown solver '" + name +
           "'; expected exact, t4mono, basis or sketch");
}

int resolve_grid_size(const B3Config& cfg) {
  if (cfg.grid.levels.size() > 0) {
    return static_cast<int>(cfg.grid.levels.size());
  }
  if (cfg.grid_size > 0) return cfg.grid_size;
  if (cfg.solver == EstimatorMethod::exact ||
      cfg.solver == EstimatorMethod::t4mono) {
    return static_cast<int>(2 * (cfg.n_prime + 1));
  }
  return 10;
}

BootstrapTrace b3_collect(const CorruptedSplit& corrupted,
                          const ClusteredDataset& data, const B3Config& cfg) {
  data.validate();
  if (corrupted.train.empty() || corrupted.valid.empty()) {
    fail(errc::degenerate_split, "bootstrap needs nonempty T-hat and V-hat");
  }
  if (cfg.n_prime < 1) fail(errc::invalid_config, "n_prime must be >= 1");
  if (cfg.t < 1) fail(errc::invalid_config, "t must be >= 1");
  if (cfg.redraw_limit < 0) {
    fail(errc::invalid_config, "redraw_limit must be >= 0");
  }

  BootstrapTrace trace;
  trace.grid = resolve_grid(corrupted, cfg);
  trace.n_prime = cfg.n_prime;
  const int m = trace.grid.size();

  const std::int64_t total =
      static_cast<std::int64_t>(m) * static_cast<std::int64_t>(cfg.t);
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> losses(static_cast<size_t>(total), kNan);
  std::vector<char> nonconverged(static_cast<size_t>(total), 0);

  std::vector<Index> valid_sorted = corrupted.valid;
  std::sort(valid_sorted.begin(), valid_sorted.end());

  auto run_slot = [&](std::int64_t slot) {
    const int level = static_cast<int>(slot / cfg.t);
    const int trial = static_cast<int>(slot % cfg.t);
    const double p_prime =
        corruption_level(trace.grid.levels[level], trace.grid.p0);

    for (int attempt = 0; attempt <= cfg.redraw_limit; ++attempt) {
      const std::uint64_t seed = derive_seed(
          cfg.seed, {kCollectSalt, static_cast<std::uint64_t>(level),
                     static_cast<std::uint64_t>(trial),
                     static_cast<std::uint64_t>(attempt)});
      const std::vector<Index> drawn = mixture_resample(
          corrupted.train, corrupted.valid, p_prime, cfg.n_prime, seed);

      // Remainder V' = V-hat minus the distinct drawn rows.
      std::vector<Index> drawn_sorted = drawn;
      std::sort(drawn_sorted.begin(), drawn_sorted.end());
      std::vector<Index> remainder;
      remainder.reserve(valid_sorted.size());
      std::set_difference(valid_sorted.begin(), valid_sorted.end(),
                          drawn_sorted.begin(), drawn_sorted.end(),
                          std::back_inserter(remainder));
      if (remainder.empty()) continue;  // redraw

      Eigen::MatrixXd Xt, Xv;
      Eigen::VectorXd yt, yv;
      gather(data, drawn, &Xt, &yt);
      gather(data, remainder, &Xv, &yv);
      const FittedModel model = fit(cfg.learner, Xt, yt);
      if (!model.converged) nonconverged[static_cast<size_t>(slot)] = 1;
      losses[static_cast<size_t>(slot)] =
          empirical_loss(model, Xv, yv, cfg.loss);
      return;
    }
  };
  parallel_for(total, cfg.threads, run_slot);

  trace.per_level_losses.resize(m, cfg.t);
  trace.b_bar.resize(m);
  trace.trial_counts.resize(m);
  for (int level = 0; level < m; ++level) {
    double sum = 0.0;
    int count = 0;
    for (int trial = 0; trial < cfg.t; ++trial) {
      const size_t slot =
          static_cast<size_t>(level) * static_cast<size_t>(cfg.t) +
          static_cast<size_t>(trial);
      trace.per_level_losses(level, trial) = losses[slot];
      if (std::isfinite(losses[slot])) {
        sum += losses[slot];
        ++count;
      } else {
        ++trace.fit_failures;
      }
      if (nonconverged[slot]) ++trace.nonconverged_fits;
    }
    if (count == 0) {
      fail(errc::insufficient_data,
           "every bootstrap trial at level " + std::to_string(level) +
               " exhausted V-hat; shrink n_prime or enlarge the split");
    }
    trace.b_bar[level] = sum / count;
    trace.trial_counts[level] = count;
  }
  return trace;
}

LossCurveEstimate b3_estimate(const BootstrapTrace& trace,
                              const B3Config& cfg) {
  const int m = trace.grid.size();
  const Index n = trace.n_prime;
  LossCurveEstimate est;
  est.method = cfg.solver;
  est.trace = trace;

  switch (cfg.solver) {
    case EstimatorMethod::exact: {
      if (m < n + 1) {
        fail(errc::grid_too_small,
             "exact inversion needs at least n_prime + 1 = " +
                 std::to_string(n + 1) + " levels, got " + std::to_string(m));
      }
      const BinomialDesign design = binomial_design(n, trace.grid);
      est.solve = least_squares(design.matrix, trace.b_bar);
      est.curve = est.solve.solution;
      est.e0_hat = est.curve[0];
      break;
    }
    case EstimatorMethod::t4mono: {
      const BinomialDesign design = binomial_design(n, trace.grid);
      est.solve = constrained_solve(design.matrix, trace.b_bar, cfg.trend);
      est.curve = est.solve.solution;
      est.e0_hat = est.curve[0];
      break;
    }
    case EstimatorMethod::basis: {
      if (m < cfg.basis.degree + 1) {
        fail(errc::grid_too_small,
             "basis inversion needs at least degree + 1 levels");
      }
      const Eigen::MatrixXd G =
          binomial_basis_product(n, trace.grid, cfg.basis);
      est.solve = least_squares(G, trace.b_bar);
      est.coefficients = est.solve.solution;
      est.e0_hat = basis_row(cfg.basis, 0.0).dot(est.coefficients);
      est.curve = basis_matrix(cfg.basis, n) * est.coefficients;
      break;
    }
    case EstimatorMethod::sketch: {
      if (m < cfg.sketch_k + 1) {
        fail(errc::grid_too_small,
             "sketched inversion needs at least k + 1 levels");
      }
      const BinomialDesign design = binomial_design(n, trace.grid);
      const SketchedDesign sk = sketch_design(design, cfg.sketch_k);
      TrendFilterConfig tf = cfg.trend;
      tf.lambda = cfg.sketch_lambda;
      est.solve = constrained_solve(sk.sketch, trace.b_bar, tf);
      est.e0_hat = est.solve.solution[0];
      est.error_bound = sketch_error_bound(sk, est.e0_hat, n);
      est.curve.resize(n + 1);
      for (Index j = 0; j <= n; ++j) {
        est.curve[j] =
            est.solve.solution[sk.assignment[static_cast<size_t>(j)]];
      }
      break;
    }
  }
  est.residual = est.solve.residual_norm;
  return est;
}

LossCurveEstimate b3_run(const CorruptedSplit& corrupted,
                         const ClusteredDataset& data, const B3Config& cfg) {
  return b3_estimate(b3_collect(corrupted, data, cfg), cfg);
}

double estimate_naive_iid(const ClusteredDataset& data,
                          const LearnerSpec& learner, LossKind loss,
                          int folds, std::uint64_t seed) {
  data.validate();
  const Index n = data.rows();
  if (folds < 2) fail(errc::invalid_config, "cross-validation needs >= 2 folds");
  if (static_cast<Index>(folds) > n) {
    fail(errc::insufficient_data, "more folds than rows");
  }

  std::vector<Index> all(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  Rng rng(derive_seed(seed, {kIidSalt}));
  const std::vector<Index> perm = shuffled(all, rng);

  double total = 0.0;
  Index start = 0;
  const Index base = n / folds;
  const Index remainder = n % folds;
  for (int f = 0; f < folds; ++f) {
    const Index size = base + (f < remainder ? 1 : 0);
    std::vector<Index> test(perm.begin() + start, perm.begin() + start + size);
    std::vector<Index> train;
    train.reserve(static_cast<size_t>(n - size));
    train.insert(train.end(), perm.begin(), perm.begin() + start);
    train.insert(train.end(), perm.begin() + start + size, perm.end());
    start += size;

    Eigen::MatrixXd Xt, Xv;
    Eigen::VectorXd yt, yv;
    gather(data, train, &Xt, &yt);
    gather(data, test, &Xv, &yv);
    const FittedModel model = fit(learner, Xt, yt);
    total += empirical_loss(model, Xv, yv, loss) * static_cast<double>(size);
  }
  return total / static_cast<double>(n);
}

double estimate_loco(const ClusteredDataset& data, bool use_approx,
                     const LearnerSpec& learner, LossKind loss,
                     int held_out_cluster) {
  const SplitPair split = loco_split(data, held_out_cluster, use_approx);
  Eigen::MatrixXd Xt, Xv;
  Eigen::VectorXd yt, yv;
  gather(data, split.train, &Xt, &yt);
  gather(data, split.valid, &Xv, &yv);
  return empirical_loss(fit(learner, Xt, yt), Xv, yv, loss);
}

OracleEstimate partition_oracle_e0(const PartitionModelConfig& model,
                                   const LearnerSpec& learner, LossKind loss,
                                   Index train_size, Index eval_size,
                                   int reps, std::uint64_t seed) {
  if (train_size < 1 || eval_size < 1 || reps < 1) {
    fail(errc::invalid_config, "oracle needs positive sizes and reps");
  }
  const PartitionSampler sampler(model);
  double sum = 0.0, sumsq = 0.0;
  for (int r = 0; r < reps; ++r) {
    Eigen::MatrixXd Xt, Xv;
    Eigen::VectorXd yt, yv;
    sampler.sample(1, train_size,
                   derive_seed(seed, {kOracleTrain,
                                      static_cast<std::uint64_t>(r)}),
                   &Xt, &yt);
    sampler.sample(2, eval_size,
                   derive_seed(seed, {kOracleEval,
                                      static_cast<std::uint64_t>(r)}),
                   &Xv, &yv);
    const double value = empirical_loss(fit(learner, Xt, yt), Xv, yv, loss);
    sum += value;
    sumsq += value * value;
  }
  OracleEstimate out;
  out.reps = reps;
  out.value = sum / reps;
  const double var =
      std::max(0.0, (sumsq - sum * sum / reps) / std::max(1, reps - 1));
  out.std_error = std::sqrt(var / reps);
  return out;
}

TestFolds make_test_folds(const CorruptedSplit& corrupted, Index n_prime,
                          int n_T, int n_T_prime, Index n_V,
                          std::uint64_t seed) {
  if (n_T < 1 || n_T_prime < 1) {
    fail(errc::invalid_config, "fold counts must be >= 1");
  }
  if (n_prime < 1 || n_V < 1) {
    fail(errc::invalid_config, "fold sizes must be >= 1");
  }
  const Index size_T = static_cast<Index>(corrupted.train.size());
  const Index size_V = static_cast<Index>(corrupted.valid.size());
  const Index fold_pairs = n_T + n_T_prime;

  if (n_T * n_prime > size_T) {
    fail(errc::insufficient_data,
         "T-hat has " + std::to_string(size_T) + " rows; at most " +
             std::to_string(size_T / n_prime) + " training folds of " +
             std::to_string(n_prime) + " fit");
  }
  if (n_T_prime * n_prime + fold_pairs * n_V > size_V) {
    const Index budget = size_V - std::min(size_V, n_T * n_V);
    const Index max_prime = budget / (n_prime + n_V);
    fail(errc::insufficient_data,
         "V-hat has " + std::to_string(size_V) +
             " rows; with these fold sizes and n_T = " + std::to_string(n_T) +
             " at most " + std::to_string(max_prime) +
             " V-hat-trained folds fit");
  }

  TestFolds folds;
  folds.fold_train = n_prime;
  folds.fold_valid = n_V;

  Rng rng_v(derive_seed(seed, {kFoldSalt, 1}));
  Rng rng_t(derive_seed(seed, {kFoldSalt, 2}));
  const std::vector<Index> vperm = shuffled(corrupted.valid, rng_v);
  const std::vector<Index> tperm = shuffled(corrupted.train, rng_t);

  auto take = [](const std::vector<Index>& pool, Index& cursor, Index count) {
    std::vector<Index> out(pool.begin() + cursor,
                           pool.begin() + cursor + count);
    cursor += count;
    return out;
  };

  Index vc = 0;
  for (int i = 0; i < n_T_prime; ++i) {
    folds.train_V.push_back(take(vperm, vc, n_prime));
  }
  for (int i = 0; i < n_T; ++i) {
    folds.valid_T.push_back(take(vperm, vc, n_V));
  }
  for (int i = 0; i < n_T_prime; ++i) {
    folds.valid_V.push_back(take(vperm, vc, n_V));
  }
  Index tc = 0;
  for (int i = 0; i < n_T; ++i) {
    folds.train_T.push_back(take(tperm, tc, n_prime));
  }
  return folds;
}

TestFolds make_test_folds(const CorruptedSplit& corrupted,
                          const TTestConfig& cfg) {
  if (cfg.n_T < 1 || cfg.n_T_prime < 1) {
    fail(errc::invalid_config, "fold counts must be >= 1");
  }
  const Index size_T = static_cast<Index>(corrupted.train.size());
  const Index size_V = static_cast<Index>(corrupted.valid.size());
  const Index fold_pairs = cfg.n_T + cfg.n_T_prime;

  const Index n_V =
      cfg.fold_valid > 0 ? cfg.fold_valid : size_V / (2 * fold_pairs);
  if (n_V < 1) {
    fail(errc::insufficient_data,
         "V-hat too small for " + std::to_string(fold_pairs) +
             " validation folds");
  }
  Index n_prime = cfg.fold_train;
  if (n_prime <= 0) {
    const Index valid_budget = size_V - fold_pairs * n_V;
    n_prime = std::min(size_T / cfg.n_T, valid_budget / cfg.n_T_prime);
    if (n_prime < 1) {
      fail(errc::insufficient_data, "split too small for training folds");
    }
  }
  return make_test_folds(corrupted, n_prime, cfg.n_T, cfg.n_T_prime, n_V,
                         cfg.seed);
}

TestResult leakage_ttest(const std::vector<double>& z,
                         const std::vector<double>& z_prime, double alpha) {
  if (z.size() < 2 || z_prime.size() < 2) {
    fail(errc::insufficient_data, "the t-test needs >= 2 values per sample");
  }
  if (alpha <= 0.0 || alpha >= 1.0) {
    fail(errc::invalid_config, "alpha must lie in (0, 1)");
  }
  const auto moments = [](const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    return std::pair<double, double>(mean, var);
  };
  const auto [ma, va] = moments(z);
  const auto [mb, vb] = moments(z_prime);
  const double na = static_cast<double>(z.size());
  const double nb = static_cast<double>(z_prime.size());

  TestResult result;
  result.alpha = alpha;
  result.z_means = {ma, mb};
  result.z_vars = {va, vb};
  result.fold_counts = {static_cast<int>(z.size()),
                        static_cast<int>(z_prime.size())};

  const double se2 = va / na + vb / nb;
  if (se2 == 0.0) {
    // Degenerate samples: the comparison is exact.
    result.dof = na + nb - 2.0;
    if (ma > mb) {
      result.t_stat = std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
    } else if (ma < mb) {
      result.t_stat = -std::numeric_limits<double>::infinity();
      result.p_value = 1.0;
    } else {
      result.t_stat = 0.0;
      result.p_value = 1.0;  // identical constants: no evidence either way
    }
  } else {
    result.t_stat = (ma - mb) / std::sqrt(se2);
    const double denom = (va / na) * (va / na) / (na - 1.0) +
                         (vb / nb) * (vb / nb) / (nb - 1.0);
    result.dof = se2 * se2 / denom;
    const boost::math::students_t_distribution<double> dist(result.dof);
    result.p_value = boost::math::cdf(boost::math::complement(
        dist, result.t_stat));
  }
  result.reject = result.p_value < alpha;
  return result;
}

TestResult leakage_test(const ClusteredDataset& data,
                        const CorruptedSplit& corrupted,
                        const TTestConfig& cfg) {
  data.validate();
  if (cfg.n_T < 2 || cfg.n_T_prime < 2) {
    fail(errc::invalid_config, "the test needs at least 2 folds per side");
  }
  const TestFolds folds = make_test_folds(corrupted, cfg);
  auto fold_loss = [&](const std::vector<Index>& train_rows,
                       const std::vector<Index>& valid_rows) {
    Eigen::MatrixXd Xt, Xv;
    Eigen::VectorXd yt, yv;
    gather(data, train_rows, &Xt, &yt);
    gather(data, valid_rows, &Xv, &yv);
    return empirical_loss(fit(cfg.learner, Xt, yt), Xv, yv, cfg.loss);
  };
  std::vector<double> z, z_prime;
  for (int i = 0; i < cfg.n_T; ++i) {
    z.push_back(fold_loss(folds.train_T[static_cast<size_t>(i)],
                          folds.valid_T[static_cast<size_t>(i)]));
  }
  for (int i = 0; i < cfg.n_T_prime; ++i) {
    z_prime.push_back(fold_loss(folds.train_V[static_cast<size_t>(i)],
                                folds.valid_V[static_cast<size_t>(i)]));
  }
  return leakage_ttest(z, z_prime, cfg.alpha);
}

}  // namespace ooc
