// Release gates for the out-of-cluster loss toolkit.  Each criterion prints
// exactly one [PASS]/[FAIL] line (details indented below it); the exit code
// is the number of failed criteria.  Pass criterion numbers as arguments to
// run a subset.

#include <gmpxx.h>
#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ooc/bench.hpp"
#include "ooc/cli.hpp"
#include "ooc/design.hpp"
#include "ooc/errors.hpp"
#include "ooc/estimators.hpp"
#include "ooc/learners.hpp"
#include "ooc/partition_model.hpp"
#include "ooc/report.hpp"
#include "ooc/rng.hpp"
#include "ooc/solvers.hpp"
#include "ooc/splitting.hpp"

namespace {

using namespace ooc;

using Notes = std::vector<std::string>;

std::string num(double v) { return format_number(v); }

// ---- criterion 1: binomial design vs exact rational arithmetic -------------

// Exact pmf entry computed in rational arithmetic at the exact binary value
// of the double probability, so only the algorithm under test can err.
double rational_pmf(Index n, Index k, const mpq_class& q) {
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  mpq_class term(binom);
  const mpq_class one_minus(1 - q);
  for (Index i = 0; i < k; ++i) term *= q;
  for (Index i = 0; i < n - k; ++i) term *= one_minus;
  return term.get_d();
}

bool criterion_design(Notes& notes) {
  double worst_rel = 0.0;
  for (Index n = 1; n <= 50; ++n) {
    for (double p : {1.0 / 7.0, 3.0 / 8.0, 0.5, 9.0 / 10.0, 0.02}) {
      const Eigen::VectorXd row = binomial_pmf(n, p);
      const mpq_class q(p);  // exact value of the double
      for (Index k = 0; k <= n; ++k) {
        const double truth = rational_pmf(n, k, q);
        const double rel =
            std::abs(row[k] - truth) / std::max(truth, 1e-300);
        worst_rel = std::max(worst_rel, rel);
      }
    }
  }
  notes.push_back("worst relative entry error (n <= 50): " + num(worst_rel));

  double worst_sum = 0.0;
  for (double p : {0.001, 0.1, 0.5, 0.9, 0.999}) {
    const Eigen::VectorXd row = binomial_pmf(100000, p);
    long double sum = 0.0L;  // extended precision so measurement error
    for (Index k = 0; k < row.size(); ++k) sum += row[k];  // stays negligible
    worst_sum =
        std::max(worst_sum, std::abs(static_cast<double>(sum - 1.0L)));
  }
  notes.push_back("worst |row sum - 1| at n = 1e5: " + num(worst_sum));
  return worst_rel <= 1e-12 && worst_sum <= 1e-12;
}

// ---- criterion 2: curve evaluation vs design-matrix dot products -----------

bool criterion_bernstein(Notes& notes) {
  Rng rng(0xACC2);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Index n = 1 + static_cast<Index>(rng.below(200));
    Eigen::VectorXd coef(n + 1);
    for (Index k = 0; k <= n; ++k) coef[k] = rng.normal();
    const double p = rng.uniform01();
    const double direct = binomial_pmf(n, p).dot(coef);
    const double recurrence = bernstein_eval(coef, p);
    worst = std::max(worst, std::abs(direct - recurrence));
  }
  notes.push_back("worst |difference| over 50 random curves: " + num(worst));
  return worst <= 1e-10;
}

// ---- criterion 3: swept loss curve is monotone and convex ------------------

bool criterion_sweep_shape(Notes& notes) {
  RunConfig run;
  run.seed = 0xC3;
  run.dataset.model.n_train = 200;
  run.dataset.model.n_valid = 1000;
  run.dataset.model.cluster_shift = {0.1, 0.0};
  run.dataset.model.memorizable_feature = true;
  run.dataset.model.seed = run.seed;
  const ClusteredDataset data = generate_partition_model(run.dataset.model);

  SweepOptions opt;
  opt.points = 11;
  opt.min_p0 = 0.0;
  opt.max_p0 = 0.9;
  opt.trials = 50;
  opt.held_out_cluster = 2;  // train side is the 200-row cluster
  const SweepCurve curve = run_sweep(data, loco_split(data, 2), opt,
                                     LearnerSpec{}, LossKind::squared_error,
                                     run.seed, 0);
  const SweepDiagnostics diag = sweep_diagnostics(curve);
  notes.push_back("isotonic residual fraction: " +
                  num(diag.isotonic_residual_fraction) + " (allowed < 0.05)");
  notes.push_back("min second difference / stderr: " +
                  num(diag.min_convexity_ratio) + " (allowed >= -2)");
  return diag.isotonic_residual_fraction < 0.05 &&
         diag.min_convexity_ratio >= -2.0;
}

// ---- criterion 4: pooled cross-validation is significantly optimistic ------

bool criterion_iid_bias(Notes& notes) {
  const std::uint64_t master = 0xACC4;
  const int seeds = 20;
  std::vector<double> margin(seeds);  // (e0 - iid) - 0.1 * e0 per seed
  double mean_fraction = 0.0;
  for (int s = 0; s < seeds; ++s) {
    PartitionModelConfig model;
    model.cluster_shift = {0.1, 0.0};
    model.memorizable_feature = true;
    model.seed = derive_seed(master, {1, static_cast<std::uint64_t>(s)});
    const ClusteredDataset data = generate_partition_model(model);
    const double e0 =
        partition_oracle_e0(model, LearnerSpec{}, LossKind::squared_error,
                            model.n_train, model.n_valid, 30,
                            derive_seed(master, {2, static_cast<std::uint64_t>(s)}))
            .value;
    const double iid = estimate_naive_iid(
        data, LearnerSpec{}, LossKind::squared_error, 5,
        derive_seed(master, {3, static_cast<std::uint64_t>(s)}));
    margin[static_cast<size_t>(s)] = (e0 - iid) - 0.1 * e0;
    mean_fraction += (e0 - iid) / e0 / seeds;
  }
  double mean = 0.0;
  for (double v : margin) mean += v / seeds;
  double ss = 0.0;
  for (double v : margin) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (seeds - 1) / seeds);
  const double t_stat = mean / se;
  const double t_crit_99_19 = 2.539483;  // one-sided, 19 dof
  notes.push_back("mean underestimate: " + num(100.0 * mean_fraction) +
                  "% of e0 (needs >= 10%)");
  notes.push_back("t statistic for margin beyond 10%: " + num(t_stat) +
                  " (needs > " + num(t_crit_99_19) + ")");
  return t_stat > t_crit_99_19;
}

// ---- criterion 5: bootstrap beats the approximate-cluster baseline ---------

bool criterion_b3_correction(Notes& notes) {
  const std::uint64_t master = 0xACC5;
  const int seeds = 20;
  int wins = 0;
  double mae_b3 = 0.0;
  double mae_loco = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const auto sub = static_cast<std::uint64_t>(s);
    PartitionModelConfig model;
    model.cluster_shift = {0.1, 0.0};
    model.memorizable_feature = true;
    model.seed = derive_seed(master, {1, sub});
    const ClusteredDataset data = generate_partition_model(model);
    const double e0 =
        partition_oracle_e0(model, LearnerSpec{}, LossKind::squared_error,
                            model.n_train, model.n_valid, 30,
                            derive_seed(master, {2, sub}))
            .value;

    const SplitPair split = loco_split(data, 2);
    LeakageConfig leak;
    leak.p0 = 0.1;
    leak.seed = derive_seed(master, {3, sub});
    const CorruptedSplit corrupted = inject_leakage(split, leak);

    B3Config cfg;
    cfg.n_prime = 8;
    cfg.t = 3000;
    cfg.grid_size = 18;
    cfg.solver = EstimatorMethod::exact;
    cfg.seed = derive_seed(master, {4, sub});
    const double e0_hat = b3_run(corrupted, data, cfg).e0_hat;

    // Baseline: pretend the corrupted split came from a clustering
    // algorithm and run leave-one-cluster-out against that assignment.
    ClusteredDataset approx = data;
    std::vector<int> assignment(static_cast<size_t>(data.rows()), 0);
    for (Index row : corrupted.train) assignment[static_cast<size_t>(row)] = 1;
    for (Index row : corrupted.valid) assignment[static_cast<size_t>(row)] = 2;
    approx.approx_clusters = assignment;
    const double loco = estimate_loco(approx, true, LearnerSpec{},
                                      LossKind::squared_error, 2);

    const double err_b3 = std::abs(e0_hat - e0);
    const double err_loco = std::abs(loco - e0);
    if (err_b3 < err_loco) ++wins;
    mae_b3 += err_b3 / seeds;
    mae_loco += err_loco / seeds;
  }
  notes.push_back("bootstrap closer to the oracle in " + std::to_string(wins) +
                  "/20 runs (needs >= 16)");
  notes.push_back("mean absolute error " + num(mae_b3) + " vs baseline " +
                  num(mae_loco) + " (needs <= half)");
  return wins >= 16 && mae_b3 <= 0.5 * mae_loco;
}

// ---- criterion 6: inversion back-ends recover synthesized curves -----------

Eigen::VectorXd decay_curve(Index n, double a, double b, double c) {
  Eigen::VectorXd e(n + 1);
  for (Index k = 0; k <= n; ++k) {
    const double r = 1.0 - static_cast<double>(k) / static_cast<double>(n);
    e[k] = a * r * r + b * r + c;
  }
  return e;
}

BootstrapTrace trace_of(const PGrid& grid, const Eigen::VectorXd& b_bar,
                        Index n) {
  BootstrapTrace trace;
  trace.grid = grid;
  trace.b_bar = b_bar;
  trace.n_prime = n;
  trace.per_level_losses.resize(grid.size(), 1);
  trace.per_level_losses.col(0) = b_bar;
  trace.trial_counts = Eigen::VectorXi::Ones(grid.size());
  return trace;
}

bool criterion_recovery(Notes& notes) {
  const Index n = 30;
  const PGrid grid = uniform_pgrid(0.0, 62);
  const BinomialDesign design = binomial_design(n, grid);
  bool ok = true;

  const Eigen::VectorXd e_star = decay_curve(n, 1.2, 0.05, 0.02);
  const Eigen::VectorXd b_bar = design.matrix * e_star;

  B3Config cfg;
  cfg.n_prime = n;
  cfg.solver = EstimatorMethod::exact;
  const LossCurveEstimate exact = b3_estimate(trace_of(grid, b_bar, n), cfg);
  const double exact_err = (exact.curve - e_star).cwiseAbs().maxCoeff();
  notes.push_back("exact inversion max-norm error: " + num(exact_err) +
                  " (allowed 1e-6)");
  ok = ok && exact_err <= 1e-6;

  // e*(r) = 1.2 r^2 + 0.05 r + 0.02 with r = 1 - x is the monomial
  // polynomial 1.2 x^2 - 2.45 x + 1.27 in the leaked fraction x.
  Eigen::VectorXd xi_star(3);
  xi_star << 1.27, -2.45, 1.2;
  cfg.solver = EstimatorMethod::basis;
  cfg.basis = BasisSpec{BasisKind::monomial, 2};
  const LossCurveEstimate basis = b3_estimate(trace_of(grid, b_bar, n), cfg);
  const double basis_err =
      (basis.coefficients - xi_star).norm() / xi_star.norm();
  notes.push_back("basis coefficient relative error: " + num(basis_err) +
                  " (allowed 1e-6)");
  ok = ok && basis_err <= 1e-6;

  cfg.solver = EstimatorMethod::sketch;
  cfg.sketch_k = 7;
  const SketchedDesign sk = sketch_design(design, 7);
  Rng rng(0xACC6);
  int covered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = 0.2 + 1.8 * rng.uniform01();
    const double b = 0.5 * rng.uniform01();
    const double c = 0.01 + 0.3 * rng.uniform01();
    const Eigen::VectorXd e_rand = decay_curve(n, a, b, c);
    const Eigen::VectorXd b_rand = design.matrix * e_rand;
    const LossCurveEstimate est = b3_estimate(trace_of(grid, b_rand, n), cfg);
    const double bound = sketch_error_bound(sk, e_rand[0], n);
    if (std::abs(est.e0_hat - e_rand[0]) <= bound) ++covered;
  }
  notes.push_back("sketch error bound held in " + std::to_string(covered) +
                  "/100 random curves");
  return ok && covered == 100;
}

// ---- criterion 7: leakage test calibration and power -----------------------

bool criterion_ttest(Notes& notes) {
  const std::uint64_t master = 0xACC7;
  TTestConfig base;
  base.n_T = 10;
  base.n_T_prime = 10;
  base.fold_train = 20;
  base.fold_valid = 25;
  base.alpha = 0.05;

  int false_rejections = 0;
  for (int sim = 0; sim < 200; ++sim) {
    const auto sub = static_cast<std::uint64_t>(sim);
    PartitionModelConfig model;  // exchangeable clusters: no shift, no
    model.n_valid = 1000;        // memorizable column
    model.seed = derive_seed(master, {1, sub});
    const ClusteredDataset data = generate_partition_model(model);
    const CorruptedSplit clean =
        assume_contamination(loco_split(data, 2), 0.0);
    TTestConfig cfg = base;
    cfg.seed = derive_seed(master, {2, sub});
    if (leakage_test(data, clean, cfg).reject) ++false_rejections;
  }
  const double rate = false_rejections / 200.0;
  notes.push_back("false rejection rate at p0 = 0: " + num(rate) +
                  " (allowed <= 0.08)");

  int detections = 0;
  for (int sim = 0; sim < 50; ++sim) {
    const auto sub = static_cast<std::uint64_t>(sim);
    PartitionModelConfig model;
    model.n_valid = 1000;
    model.cluster_shift = {0.1, 0.0};
    model.memorizable_feature = true;
    model.seed = derive_seed(master, {3, sub});
    const ClusteredDataset data = generate_partition_model(model);
    LeakageConfig leak;
    leak.p0 = 0.2;
    leak.seed = derive_seed(master, {4, sub});
    const CorruptedSplit corrupted =
        inject_leakage(loco_split(data, 2), leak);
    TTestConfig cfg = base;
    cfg.seed = derive_seed(master, {5, sub});
    if (leakage_test(data, corrupted, cfg).reject) ++detections;
  }
  const double power = detections / 50.0;
  notes.push_back("power at p0 = 0.2 on memorizable data: " + num(power) +
                  " (needs >= 0.8)");
  return rate <= 0.08 && power >= 0.8;
}

// ---- criterion 8: solver cost scales as designed ---------------------------

bool criterion_scaling(Notes& notes) {
  BenchOptions all;
  all.methods = {EstimatorMethod::exact, EstimatorMethod::t4mono,
                 EstimatorMethod::basis, EstimatorMethod::sketch};
  all.sizes = {100, 1000};
  all.reps = 3;
  all.min_seconds = 0.05;
  const std::vector<BenchRow> rows = run_solver_bench(all);

  auto seconds = [&rows](EstimatorMethod m, Index n) {
    for (const BenchRow& row : rows) {
      if (row.method == m && row.n_prime == n) return row.seconds;
    }
    return -1.0;
  };
  // The exact design is ill-conditioned at these sizes and the sketch's
  // retained first column underflows once n' reaches ~1000, so those rows
  // carry an expected failed flag; only the cost model is under test there.
  // Basis and t4mono solves (and the small sketch) must stay clean.
  bool ok = true;
  for (const BenchRow& row : rows) {
    if (!row.failed) continue;
    const bool expected =
        row.method == EstimatorMethod::exact ||
        (row.method == EstimatorMethod::sketch && row.n_prime >= 1000);
    notes.push_back(std::string(expected ? "expected ill-conditioned stage: "
                                         : "stage failed: ") +
                    method_name(row.method) + " at n' = " +
                    std::to_string(row.n_prime));
    if (!expected) ok = false;
  }
  for (Index n : {100, 1000}) {
    const double basis = seconds(EstimatorMethod::basis, n);
    const double sketch = seconds(EstimatorMethod::sketch, n);
    const double t4 = seconds(EstimatorMethod::t4mono, n);
    notes.push_back("n' = " + std::to_string(n) + ": basis " + num(basis) +
                    "s < sketch " + num(sketch) + "s < t4mono " + num(t4) +
                    "s");
    ok = ok && basis < sketch && sketch < t4;
  }

  // Basis cost is independent of n', so stretch it two decades.
  BenchOptions wide;
  wide.methods = {EstimatorMethod::basis};
  wide.sizes = {100, 10000};
  wide.reps = 3;
  wide.min_seconds = 0.05;
  const std::vector<BenchRow> brows = run_solver_bench(wide);
  const double basis_slope = std::log(brows[1].seconds / brows[0].seconds) /
                             std::log(10000.0 / 100.0);
  const double exact_slope =
      std::log(seconds(EstimatorMethod::exact, 1000) /
               seconds(EstimatorMethod::exact, 100)) /
      std::log(10.0);
  const double t4_slope = std::log(seconds(EstimatorMethod::t4mono, 1000) /
                                   seconds(EstimatorMethod::t4mono, 100)) /
                          std::log(10.0);
  notes.push_back("log-log slopes: basis " + num(basis_slope) +
                  " (allowed <= 0.1), exact " + num(exact_slope) +
                  ", t4mono " + num(t4_slope) + " (each needs >= 1.5)");
  return ok && basis_slope <= 0.1 && exact_slope >= 1.5 && t4_slope >= 1.5;
}

// ---- criterion 9: deterministic artifacts across runs and threads ----------

int shell(const std::string& command) {
  const int rc = std::system(command.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

// Timing lines carry the only run-to-run variation; everything else must be
// byte-identical.
std::string drop_timing_lines(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("seconds") == std::string::npos) out << line << '\n';
  }
  return out.str();
}

std::string drop_seconds_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    if (fields.size() == 4) {
      out << fields[0] << ',' << fields[1] << ',' << fields[3] << '\n';
    } else {
      out << line << '\n';
    }
  }
  return out.str();
}

bool criterion_determinism(Notes& notes) {
  namespace fs = std::filesystem;
  const fs::path root =
      fs::temp_directory_path() /
      ("ooc-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(root);
  struct Cleanup {
    fs::path path;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  } cleanup{root};

  const std::string model =
      R"("dataset": {"model": {"n_train": 50, "n_valid": 120,
                               "cluster_shift": [0.1, 0],
                               "memorizable_feature": true}})";
  struct Job {
    const char* command;
    std::string config;
    std::vector<const char*> artifacts;  // compared byte-for-byte
  };
  const std::vector<Job> jobs = {
      {"simulate", "{" + model + R"(, "simulate": {"oracle_reps": 4}})",
       {"dataset.csv", "dataset.json"}},
      {"estimate",
       "{" + model +
           R"(, "estimate": {"method": "b3-basis", "n_prime": 6, "t": 150}})",
       {"curve.csv"}},
      {"sweep",
       "{" + model + R"(, "sweep": {"points": 3, "max_p0": 0.6, "trials": 4}})",
       {"curve.csv"}},
      {"test",
       "{" + model +
           R"(, "test": {"p0": 0.2, "n_T": 3, "n_T_prime": 3,
                         "fold_train": 6, "fold_valid": 8,
                         "held_out_cluster": 2}})",
       {}},
      {"bench",
       R"({"bench": {"methods": ["basis", "sketch"], "sizes": [40],
                     "reps": 1, "min_seconds": 0.005}})",
       {}},
  };

  bool ok = true;
  for (const Job& job : jobs) {
    const fs::path cfg = root / (std::string(job.command) + ".json");
    write_text_file(cfg.string(), job.config);
    const int threads[3] = {1, 1, 8};
    std::vector<fs::path> outs;
    for (int run = 0; run < 3; ++run) {
      const fs::path out =
          root / (std::string(job.command) + "-" + std::to_string(run));
      outs.push_back(out);
      const std::string line = std::string(OOC_CLI_PATH) + " " + job.command +
                               " --config \"" + cfg.string() + "\" --seed 7" +
                               " --threads " + std::to_string(threads[run]) +
                               " --out \"" + out.string() +
                               "\" > /dev/null 2>&1";
      const int rc = shell(line);
      if (rc != 0) {
        notes.push_back(std::string(job.command) + " run " +
                        std::to_string(run) + " exited with code " +
                        std::to_string(rc));
        ok = false;
      }
    }
    if (!ok) break;

    auto artifact = [&outs](int run, const std::string& name) {
      return read_text_file((outs[static_cast<size_t>(run)] / name).string());
    };
    const std::string report = drop_timing_lines(artifact(0, "report.json"));
    for (int run : {1, 2}) {
      if (drop_timing_lines(artifact(run, "report.json")) != report) {
        notes.push_back(std::string(job.command) +
                        ": report.json differs between runs");
        ok = false;
      }
    }
    for (const char* name : job.artifacts) {
      const std::string first = artifact(0, name);
      for (int run : {1, 2}) {
        if (artifact(run, name) != first) {
          notes.push_back(std::string(job.command) + ": " + name +
                          " differs between runs");
          ok = false;
        }
      }
    }
    if (std::string(job.command) == "bench") {
      const std::string first = drop_seconds_column(artifact(0, "bench.csv"));
      for (int run : {1, 2}) {
        if (drop_seconds_column(artifact(run, "bench.csv")) != first) {
          notes.push_back("bench: bench.csv differs between runs");
          ok = false;
        }
      }
    }
  }
  if (ok) {
    notes.push_back(
        "all five commands: artifacts byte-identical over repeated runs and "
        "--threads 1 vs 8 (timing lines excluded)");
  }
  return ok;
}

// ---- criterion 10: gradients and constrained solves are sound --------------

bool criterion_solver_sanity(Notes& notes) {
  Rng rng(0xACC10);
  bool ok = true;

  double worst_grad = 0.0;
  for (LearnerKind kind : {LearnerKind::ridge, LearnerKind::logistic_l2,
                           LearnerKind::squared_hinge_l2}) {
    for (int rep = 0; rep < 5; ++rep) {
      const Index n = 30;
      const Index d = 3;
      Eigen::MatrixXd X(n, d);
      Eigen::VectorXd y(n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) X(i, j) = rng.normal();
        y[i] = kind == LearnerKind::ridge ? rng.normal()
                                          : (rng.uniform01() < 0.5 ? -1.0 : 1.0);
      }
      Eigen::VectorXd w(d + 1);
      for (Index j = 0; j <= d; ++j) w[j] = 0.5 * rng.normal();
      LearnerSpec spec;
      spec.kind = kind;
      const Eigen::VectorXd grad = objective_gradient(spec, w, X, y);
      Eigen::VectorXd fd(d + 1);
      const double h = 1e-6;
      for (Index j = 0; j <= d; ++j) {
        Eigen::VectorXd hi = w, lo = w;
        hi[j] += h;
        lo[j] -= h;
        fd[j] = (objective(spec, hi, X, y) - objective(spec, lo, X, y)) /
                (2.0 * h);
      }
      const double rel = (grad - fd).cwiseAbs().maxCoeff() /
                         std::max(1.0, grad.cwiseAbs().maxCoeff());
      worst_grad = std::max(worst_grad, rel);
    }
  }
  notes.push_back("worst gradient vs finite-difference relative error: " +
                  num(worst_grad) + " (allowed 1e-6)");
  ok = ok && worst_grad <= 1e-6;

  double worst_match = 0.0;
  double worst_violation = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Index rows = 12, cols = 8;
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) A(i, j) = rng.normal();
      b[i] = rng.normal();
    }
    TrendFilterConfig off;
    off.monotone = false;
    off.nonneg = false;
    off.lambda = 0.0;
    const Eigen::VectorXd direct = least_squares(A, b).solution;
    const Eigen::VectorXd via = constrained_solve(A, b, off).solution;
    worst_match = std::max(
        worst_match,
        (direct - via).norm() / std::max(1.0, direct.norm()));

    TrendFilterConfig mono;  // defaults: monotone, order 4
    mono.lambda = 0.05;
    const Eigen::VectorXd shaped = constrained_solve(A, b, mono).solution;
    for (Index i = 0; i + 1 < shaped.size(); ++i) {
      worst_violation = std::max(worst_violation, shaped[i + 1] - shaped[i]);
    }
  }
  notes.push_back("constraints-off vs least-squares worst gap: " +
                  num(worst_match) + " (allowed 1e-8)");
  notes.push_back("worst monotonicity violation: " + num(worst_violation) +
                  " (allowed 1e-9)");
  return ok && worst_match <= 1e-8 && worst_violation <= 1e-9;
}

struct Criterion {
  int id;
  const char* name;
  bool (*run)(Notes&);
};

const Criterion kCriteria[] = {
    {1, "binomial design matches exact rational arithmetic",
     criterion_design},
    {2, "curve evaluation matches design-matrix products",
     criterion_bernstein},
    {3, "swept loss curve is monotone and convex", criterion_sweep_shape},
    {4, "pooled cross-validation is significantly optimistic",
     criterion_iid_bias},
    {5, "bootstrap correction beats the approximate-cluster baseline",
     criterion_b3_correction},
    {6, "inversion back-ends recover synthesized curves", criterion_recovery},
    {7, "leakage test is calibrated and powerful", criterion_ttest},
    {8, "solver cost scales as designed", criterion_scaling},
    {9, "artifacts are deterministic across runs and thread counts",
     criterion_determinism},
    {10, "gradients and constrained solves are sound",
     criterion_solver_sanity},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& criterion : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), criterion.id) ==
            selected.end()) {
      continue;
    }
    Notes notes;
    bool passed = false;
    try {
      passed = criterion.run(notes);
    } catch (const std::exception& e) {
      notes.push_back(std::string("threw: ") + e.what());
    }
    std::cout << (passed ? "[PASS]" : "[FAIL]") << " criterion "
              << criterion.id << ": " << criterion.name << '\n';
    for (const std::string& note : notes) {
      std::cout << "    " << note << '\n';
    }
    if (!passed) ++failures;
  }
  return failures;
}
