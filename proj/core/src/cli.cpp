#include "ooc/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>

#include "ooc/csv.hpp"
#include "ooc/design.hpp"
#include "ooc/errors.hpp"
#include "ooc/parallel.hpp"
#include "ooc/partition_model.hpp"
#include "ooc/report.hpp"
#include "ooc/rng.hpp"
#include "ooc/solvers.hpp"
#include "ooc/splitting.hpp"

namespace ooc {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSweepSalt = 0x53EE;

// ---- enum <-> string -------------------------------------------------------

const char* task_name(Task task) {
  return task == Task::regression ? "regression" : "classification";
}

Task task_from_name(const std::string& name) {
  if (name == "regression") return Task::regression;
  if (name == "classification") return Task::classification;
  fail(errc::invalid_config, "unknown task '" + name +
                                 "'; expected regression or classification");
}

const char* direction_name(LeakDirection direction) {
  return direction == LeakDirection::valid_to_train ? "valid-to-train"
                                                    : "train-to-valid";
}

LeakDirection direction_from_name(const std::string& name) {
  if (name == "valid-to-train") return LeakDirection::valid_to_train;
  if (name == "train-to-valid") return LeakDirection::train_to_valid;
  fail(errc::invalid_config,
       "unknown direction '" + name +
           "'; expected valid-to-train or train-to-valid");
}

const char* leak_name(LeakMode mode) {
  switch (mode) {
    case LeakMode::none: return "none";
    case LeakMode::inject: return "inject";
    case LeakMode::assume: return "assume";
  }
  return "none";
}

LeakMode leak_from_name(const std::string& name) {
  if (name == "none") return LeakMode::none;
  if (name == "inject") return LeakMode::inject;
  if (name == "assume") return LeakMode::assume;
  fail(errc::invalid_config, "unknown leak mode '" + name +
                                 "'; expected none, inject or assume");
}

const char* basis_kind_name(BasisKind kind) {
  return kind == BasisKind::chebyshev ? "chebyshev" : "monomial";
}

BasisKind basis_kind_from_name(const std::string& name) {
  if (name == "chebyshev") return BasisKind::chebyshev;
  if (name == "monomial") return BasisKind::monomial;
  fail(errc::invalid_config, "unknown basis '" + name +
                                 "'; expected chebyshev or monomial");
}

// ---- strict config parsing -------------------------------------------------

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) {
    fail(errc::invalid_config, "config section '" + path +
                                   "' must be a JSON object");
  }
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail(errc::invalid_config,
           "unknown config key '" + path + it.key() + "'");
    }
  }
}

void get_to(const json& obj, const std::string& path, const char* key,
            double* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    fail(errc::invalid_config, "'" + path + key + "' must be a number");
  }
  *out = v.get<double>();
}

void get_to(const json& obj, const std::string& path, const char* key,
            int* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail(errc::invalid_config, "'" + path + key + "' must be an integer");
  }
  *out = v.get<int>();
}

void get_to(const json& obj, const std::string& path, const char* key,
            Index* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    fail(errc::invalid_config, "'" + path + key + "' must be an integer");
  }
  *out = v.get<Index>();
}

void get_to(const json& obj, const std::string& path, const char* key,
            std::uint64_t* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() ||
      (v.is_number_integer() && !v.is_number_unsigned() &&
       v.get<std::int64_t>() < 0)) {
    fail(errc::invalid_config,
         "'" + path + key + "' must be a non-negative integer");
  }
  *out = v.get<std::uint64_t>();
}

void get_to(const json& obj, const std::string& path, const char* key,
            bool* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    fail(errc::invalid_config, "'" + path + key + "' must be a boolean");
  }
  *out = v.get<bool>();
}

void get_to(const json& obj, const std::string& path, const char* key,
            std::string* out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    fail(errc::invalid_config, "'" + path + key + "' must be a string");
  }
  *out = v.get<std::string>();
}

std::string get_enum(const json& obj, const std::string& path,
                     const char* key, const std::string& current) {
  std::string value = current;
  get_to(obj, path, key, &value);
  return value;
}

void parse_model(const json& v, const std::string& path,
                 PartitionModelConfig* model) {
  expect_object(v, path);
  check_keys(v, path, {"n_train", "n_valid", "d", "cluster_shift",
                       "noise_std", "memorizable_feature", "task"});
  get_to(v, path, "n_train", &model->n_train);
  get_to(v, path, "n_valid", &model->n_valid);
  get_to(v, path, "d", &model->d);
  if (v.contains("cluster_shift")) {
    const json& shift = v.at("cluster_shift");
    if (!shift.is_array()) {
      fail(errc::invalid_config, "'" + path + "cluster_shift' must be an "
                                 "array of numbers");
    }
    model->cluster_shift.clear();
    for (const json& entry : shift) {
      if (!entry.is_number()) {
        fail(errc::invalid_config, "'" + path + "cluster_shift' must be an "
                                   "array of numbers");
      }
      model->cluster_shift.push_back(entry.get<double>());
    }
  }
  get_to(v, path, "noise_std", &model->noise_std);
  get_to(v, path, "memorizable_feature", &model->memorizable_feature);
  model->task = task_from_name(
      get_enum(v, path, "task", task_name(model->task)));
}

void parse_dataset(const json& v, const std::string& path,
                   DatasetOptions* dataset) {
  expect_object(v, path);
  check_keys(v, path, {"path", "label_column", "cluster_column",
                       "approx_column", "model"});
  get_to(v, path, "path", &dataset->path);
  get_to(v, path, "label_column", &dataset->label_column);
  get_to(v, path, "cluster_column", &dataset->cluster_column);
  get_to(v, path, "approx_column", &dataset->approx_column);
  if (v.contains("model")) {
    parse_model(v.at("model"), path + "model/", &dataset->model);
  }
}

void parse_learner(const json& v, const std::string& path,
                   LearnerSpec* learner) {
  expect_object(v, path);
  check_keys(v, path, {"kind", "reg_strength", "max_iter", "tol"});
  learner->kind = learner_from_name(
      get_enum(v, path, "kind", learner_name(learner->kind)));
  get_to(v, path, "reg_strength", &learner->reg_strength);
  get_to(v, path, "max_iter", &learner->max_iter);
  get_to(v, path, "tol", &learner->tol);
}

void parse_trend(const json& v, const std::string& path,
                 TrendFilterConfig* trend) {
  expect_object(v, path);
  check_keys(v, path,
             {"order", "lambda", "monotone", "nonneg", "max_iter", "tol"});
  get_to(v, path, "order", &trend->order);
  get_to(v, path, "lambda", &trend->lambda);
  get_to(v, path, "monotone", &trend->monotone);
  get_to(v, path, "nonneg", &trend->nonneg);
  get_to(v, path, "max_iter", &trend->max_iter);
  get_to(v, path, "tol", &trend->tol);
}

void parse_basis(const json& v, const std::string& path, BasisSpec* basis) {
  expect_object(v, path);
  check_keys(v, path, {"kind", "degree"});
  basis->kind = basis_kind_from_name(
      get_enum(v, path, "kind", basis_kind_name(basis->kind)));
  get_to(v, path, "degree", &basis->degree);
}

void parse_estimate(const json& v, const std::string& path,
                    EstimateOptions* opt) {
  expect_object(v, path);
  check_keys(v, path, {"method", "p0", "leak", "direction",
                       "held_out_cluster", "use_approx", "folds", "n_prime",
                       "t", "grid", "grid_size", "trend", "basis", "sketch_k",
                       "sketch_lambda", "redraw_limit"});
  get_to(v, path, "method", &opt->method);
  get_to(v, path, "p0", &opt->p0);
  opt->leak = leak_from_name(get_enum(v, path, "leak", leak_name(opt->leak)));
  opt->direction = direction_from_name(
      get_enum(v, path, "direction", direction_name(opt->direction)));
  get_to(v, path, "held_out_cluster", &opt->held_out_cluster);
  get_to(v, path, "use_approx", &opt->use_approx);
  get_to(v, path, "folds", &opt->folds);
  get_to(v, path, "n_prime", &opt->b3.n_prime);
  get_to(v, path, "t", &opt->b3.t);
  get_to(v, path, "grid_size", &opt->b3.grid_size);
  if (v.contains("grid")) {
    const json& grid = v.at("grid");
    if (!grid.is_array()) {
      fail(errc::invalid_config,
           "'" + path + "grid' must be an array of levels");
    }
    opt->b3.grid.levels.resize(static_cast<Index>(grid.size()));
    Index i = 0;
    for (const json& entry : grid) {
      if (!entry.is_number()) {
        fail(errc::invalid_config,
             "'" + path + "grid' must be an array of levels");
      }
      opt->b3.grid.levels[i++] = entry.get<double>();
    }
  }
  opt->b3.grid.p0 = opt->p0;
  if (v.contains("trend")) {
    parse_trend(v.at("trend"), path + "trend/", &opt->b3.trend);
  }
  if (v.contains("basis")) {
    parse_basis(v.at("basis"), path + "basis/", &opt->b3.basis);
  }
  get_to(v, path, "sketch_k", &opt->b3.sketch_k);
  get_to(v, path, "sketch_lambda", &opt->b3.sketch_lambda);
  get_to(v, path, "redraw_limit", &opt->b3.redraw_limit);
}

void parse_sweep(const json& v, const std::string& path, SweepOptions* opt) {
  expect_object(v, path);
  check_keys(v, path, {"points", "min_p0", "max_p0", "trials",
                       "held_out_cluster", "use_approx", "direction"});
  get_to(v, path, "points", &opt->points);
  get_to(v, path, "min_p0", &opt->min_p0);
  get_to(v, path, "max_p0", &opt->max_p0);
  get_to(v, path, "trials", &opt->trials);
  get_to(v, path, "held_out_cluster", &opt->held_out_cluster);
  get_to(v, path, "use_approx", &opt->use_approx);
  opt->direction = direction_from_name(
      get_enum(v, path, "direction", direction_name(opt->direction)));
}

void parse_test(const json& v, const std::string& path, TestOptions* opt) {
  expect_object(v, path);
  check_keys(v, path,
             {"n_T", "n_T_prime", "fold_train", "fold_valid", "alpha", "p0",
              "leak", "direction", "held_out_cluster", "use_approx"});
  get_to(v, path, "n_T", &opt->ttest.n_T);
  get_to(v, path, "n_T_prime", &opt->ttest.n_T_prime);
  get_to(v, path, "fold_train", &opt->ttest.fold_train);
  get_to(v, path, "fold_valid", &opt->ttest.fold_valid);
  get_to(v, path, "alpha", &opt->ttest.alpha);
  get_to(v, path, "p0", &opt->p0);
  opt->leak = leak_from_name(get_enum(v, path, "leak", leak_name(opt->leak)));
  opt->direction = direction_from_name(
      get_enum(v, path, "direction", direction_name(opt->direction)));
  get_to(v, path, "held_out_cluster", &opt->held_out_cluster);
  get_to(v, path, "use_approx", &opt->use_approx);
}

void parse_simulate(const json& v, const std::string& path,
                    SimulateOptions* opt) {
  expect_object(v, path);
  check_keys(v, path, {"oracle_reps", "oracle_train", "oracle_eval"});
  get_to(v, path, "oracle_reps", &opt->oracle_reps);
  get_to(v, path, "oracle_train", &opt->oracle_train);
  get_to(v, path, "oracle_eval", &opt->oracle_eval);
}

void parse_bench(const json& v, const std::string& path, BenchOptions* opt) {
  expect_object(v, path);
  check_keys(v, path, {"methods", "sizes", "reps", "p0", "grid_size",
                       "min_seconds"});
  if (v.contains("methods")) {
    const json& methods = v.at("methods");
    if (!methods.is_array()) {
      fail(errc::invalid_config,
           "'" + path + "methods' must be an array of method names");
    }
    opt->methods.clear();
    for (const json& entry : methods) {
      if (!entry.is_string()) {
        fail(errc::invalid_config,
             "'" + path + "methods' must be an array of method names");
      }
      opt->methods.push_back(method_from_name(entry.get<std::string>()));
    }
  }
  if (v.contains("sizes")) {
    const json& sizes = v.at("sizes");
    if (!sizes.is_array()) {
      fail(errc::invalid_config,
           "'" + path + "sizes' must be an array of integers");
    }
    opt->sizes.clear();
    for (const json& entry : sizes) {
      if (!entry.is_number_integer()) {
        fail(errc::invalid_config,
             "'" + path + "sizes' must be an array of integers");
      }
      opt->sizes.push_back(entry.get<Index>());
    }
  }
  get_to(v, path, "reps", &opt->reps);
  get_to(v, path, "p0", &opt->p0);
  get_to(v, path, "grid_size", &opt->grid_size);
  get_to(v, path, "min_seconds", &opt->min_seconds);
}

// ---- config echo -----------------------------------------------------------

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json model_json(const PartitionModelConfig& model) {
  std::vector<double> shift = model.cluster_shift;
  if (shift.empty()) shift.assign(static_cast<size_t>(model.d), 0.0);
  return json{{"n_train", model.n_train},
              {"n_valid", model.n_valid},
              {"d", model.d},
              {"cluster_shift", shift},
              {"noise_std", model.noise_std},
              {"memorizable_feature", model.memorizable_feature},
              {"task", task_name(model.task)}};
}

json learner_json(const LearnerSpec& learner) {
  return json{{"kind", learner_name(learner.kind)},
              {"reg_strength", learner.reg_strength},
              {"max_iter", learner.max_iter},
              {"tol", learner.tol}};
}

json trend_json(const TrendFilterConfig& trend) {
  return json{{"order", trend.order},       {"lambda", trend.lambda},
              {"monotone", trend.monotone}, {"nonneg", trend.nonneg},
              {"max_iter", trend.max_iter}, {"tol", trend.tol}};
}

json config_echo(const RunConfig& cfg) {
  json dataset{{"path", cfg.dataset.path},
               {"label_column", cfg.dataset.label_column},
               {"cluster_column", cfg.dataset.cluster_column},
               {"approx_column", cfg.dataset.approx_column},
               {"model", model_json(cfg.dataset.model)}};
  json estimate{{"method", cfg.estimate.method},
                {"p0", cfg.estimate.p0},
                {"leak", leak_name(cfg.estimate.leak)},
                {"direction", direction_name(cfg.estimate.direction)},
                {"held_out_cluster", cfg.estimate.held_out_cluster},
                {"use_approx", cfg.estimate.use_approx},
                {"folds", cfg.estimate.folds},
                {"n_prime", cfg.estimate.b3.n_prime},
                {"t", cfg.estimate.b3.t},
                {"grid", vec_json(cfg.estimate.b3.grid.levels)},
                {"grid_size", cfg.estimate.b3.grid_size},
                {"trend", trend_json(cfg.estimate.b3.trend)},
                {"basis",
                 json{{"kind", basis_kind_name(cfg.estimate.b3.basis.kind)},
                      {"degree", cfg.estimate.b3.basis.degree}}},
                {"sketch_k", cfg.estimate.b3.sketch_k},
                {"sketch_lambda", cfg.estimate.b3.sketch_lambda},
                {"redraw_limit", cfg.estimate.b3.redraw_limit}};
  json sweep{{"points", cfg.sweep.points},
             {"min_p0", cfg.sweep.min_p0},
             {"max_p0", cfg.sweep.max_p0},
             {"trials", cfg.sweep.trials},
             {"held_out_cluster", cfg.sweep.held_out_cluster},
             {"use_approx", cfg.sweep.use_approx},
             {"direction", direction_name(cfg.sweep.direction)}};
  json test{{"n_T", cfg.test.ttest.n_T},
            {"n_T_prime", cfg.test.ttest.n_T_prime},
            {"fold_train", cfg.test.ttest.fold_train},
            {"fold_valid", cfg.test.ttest.fold_valid},
            {"alpha", cfg.test.ttest.alpha},
            {"p0", cfg.test.p0},
            {"leak", leak_name(cfg.test.leak)},
            {"direction", direction_name(cfg.test.direction)},
            {"held_out_cluster", cfg.test.held_out_cluster},
            {"use_approx", cfg.test.use_approx}};
  json simulate{{"oracle_reps", cfg.simulate.oracle_reps},
                {"oracle_train", cfg.simulate.oracle_train},
                {"oracle_eval", cfg.simulate.oracle_eval}};
  json methods = json::array();
  for (EstimatorMethod method : cfg.bench.methods) {
    methods.push_back(method_name(method));
  }
  json bench{{"methods", methods},
             {"sizes", cfg.bench.sizes},
             {"reps", cfg.bench.reps},
             {"p0", cfg.bench.p0},
             {"grid_size", cfg.bench.grid_size},
             {"min_seconds", cfg.bench.min_seconds}};
  return json{{"seed", cfg.seed},
              {"loss", loss_name(cfg.loss)},
              {"dataset", dataset},
              {"learner", learner_json(cfg.learner)},
              {"estimate", estimate},
              {"sweep", sweep},
              {"test", test},
              {"simulate", simulate},
              {"bench", bench}};
}

// ---- shared command plumbing -----------------------------------------------

class ReportTimer {
 public:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string out_path(const RunConfig& cfg, const std::string& name) {
  namespace fs = std::filesystem;
  try {
    if (!cfg.out.empty()) fs::create_directories(cfg.out);
  } catch (const fs::filesystem_error& e) {
    fail(errc::io_failure, std::string("cannot create output directory: ") +
                               e.what());
  }
  return (fs::path(cfg.out.empty() ? "." : cfg.out) / name).string();
}

void emit_report(const RunConfig& cfg, const char* command,
                 const json& result, const ReportTimer& timer) {
  const json report{{"schema", kReportSchema},
                    {"version", kArtifactVersion},
                    {"command", command},
                    {"seed", cfg.seed},
                    {"config", config_echo(cfg)},
                    {"result", result},
                    {"wall_clock_seconds", timer.elapsed()}};
  write_text_file(out_path(cfg, "report.json"), report.dump(2) + "\n");
}

void gather(const ClusteredDataset& data, const std::vector<Index>& rows,
            Eigen::MatrixXd* X, Eigen::VectorXd* y) {
  X->resize(static_cast<Index>(rows.size()), data.cols());
  y->resize(static_cast<Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    X->row(static_cast<Index>(i)) = data.features.row(rows[i]);
    (*y)[static_cast<Index>(i)] = data.labels[rows[i]];
  }
}

CorruptedSplit make_corrupted(const SplitPair& split, LeakMode leak,
                              double p0, LeakDirection direction,
                              std::uint64_t seed) {
  switch (leak) {
    case LeakMode::none:
      return assume_contamination(split, 0.0);
    case LeakMode::inject: {
      LeakageConfig lc;
      lc.p0 = p0;
      lc.direction = direction;
      lc.seed = seed;
      return inject_leakage(split, lc);
    }
    case LeakMode::assume:
      return assume_contamination(split, p0);
  }
  fail(errc::invalid_config, "unhandled leak mode");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(errc::invalid_config,
         std::string("config is not valid JSON: ") + e.what());
  }
  expect_object(root, "");
  check_keys(root, "", {"seed", "threads", "out", "dataset", "learner",
                        "loss", "estimate", "sweep", "test", "simulate",
                        "bench"});
  RunConfig cfg;
  get_to(root, "", "seed", &cfg.seed);
  get_to(root, "", "threads", &cfg.threads);
  get_to(root, "", "out", &cfg.out);
  if (root.contains("dataset")) {
    parse_dataset(root.at("dataset"), "dataset/", &cfg.dataset);
  }
  if (root.contains("learner")) {
    parse_learner(root.at("learner"), "learner/", &cfg.learner);
  }
  cfg.loss = loss_from_name(get_enum(root, "", "loss", loss_name(cfg.loss)));
  if (root.contains("estimate")) {
    parse_estimate(root.at("estimate"), "estimate/", &cfg.estimate);
  }
  if (root.contains("sweep")) {
    parse_sweep(root.at("sweep"), "sweep/", &cfg.sweep);
  }
  if (root.contains("test")) {
    parse_test(root.at("test"), "test/", &cfg.test);
  }
  if (root.contains("simulate")) {
    parse_simulate(root.at("simulate"), "simulate/", &cfg.simulate);
  }
  if (root.contains("bench")) {
    parse_bench(root.at("bench"), "bench/", &cfg.bench);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(errc::invalid_config, std::string("config: ") + e.what());
  }
  return parse_run_config(text);
}

ClusteredDataset load_or_simulate(const RunConfig& cfg) {
  if (!cfg.dataset.path.empty()) {
    return load_csv(cfg.dataset.path, cfg.dataset.label_column,
                    cfg.dataset.cluster_column, cfg.dataset.approx_column);
  }
  PartitionModelConfig model = cfg.dataset.model;
  model.seed = cfg.seed;
  return generate_partition_model(model);
}

SweepCurve run_sweep(const ClusteredDataset& data, const SplitPair& split,
                     const SweepOptions& opt, const LearnerSpec& learner,
                     LossKind loss, std::uint64_t seed, int threads) {
  data.validate();
  if (opt.points < 1) fail(errc::invalid_config, "sweep needs points >= 1");
  if (opt.trials < 1) fail(errc::invalid_config, "sweep needs trials >= 1");
  if (!(opt.min_p0 >= 0.0 && opt.min_p0 <= opt.max_p0 && opt.max_p0 < 1.0)) {
    fail(errc::invalid_config,
         "sweep levels must satisfy 0 <= min_p0 <= max_p0 < 1");
  }
  if (split.train.empty() || split.valid.empty()) {
    fail(errc::degenerate_split, "sweep needs nonempty T-hat and V-hat");
  }

  SweepCurve curve;
  curve.levels.resize(opt.points);
  for (int i = 0; i < opt.points; ++i) {
    curve.levels[i] =
        opt.points == 1
            ? opt.min_p0
            : opt.min_p0 + (opt.max_p0 - opt.min_p0) * i / (opt.points - 1);
  }

  const std::int64_t total =
      static_cast<std::int64_t>(opt.points) * opt.trials;
  std::vector<double> values(static_cast<size_t>(total),
                             std::numeric_limits<double>::quiet_NaN());
  auto run_slot = [&](std::int64_t slot) {
    const int level = static_cast<int>(slot / opt.trials);
    const int trial = static_cast<int>(slot % opt.trials);
    LeakageConfig lc;
    lc.p0 = curve.levels[level];
    lc.direction = opt.direction;
    lc.seed = derive_seed(seed, {kSweepSalt, static_cast<std::uint64_t>(level),
                                 static_cast<std::uint64_t>(trial)});
    const CorruptedSplit corrupted = inject_leakage(split, lc);
    if (corrupted.valid.empty()) return;  // leave NaN, dropped in the mean
    Eigen::MatrixXd Xt, Xv;
    Eigen::VectorXd yt, yv;
    gather(data, corrupted.train, &Xt, &yt);
    gather(data, corrupted.valid, &Xv, &yv);
    values[static_cast<size_t>(slot)] =
        empirical_loss(fit(learner, Xt, yt), Xv, yv, loss);
  };
  parallel_for(total, threads, run_slot);

  curve.means.resize(opt.points);
  curve.stderrs.resize(opt.points);
  for (int level = 0; level < opt.points; ++level) {
    double sum = 0.0;
    int count = 0;
    for (int trial = 0; trial < opt.trials; ++trial) {
      const double v = values[static_cast<size_t>(level) * opt.trials + trial];
      if (std::isfinite(v)) {
        sum += v;
        ++count;
      }
    }
    if (count == 0) {
      fail(errc::insufficient_data,
           "every sweep trial at p0 = " +
               std::to_string(curve.levels[level]) +
               " moved all of V-hat; lower max_p0 or enlarge the split");
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (int trial = 0; trial < opt.trials; ++trial) {
      const double v = values[static_cast<size_t>(level) * opt.trials + trial];
      if (std::isfinite(v)) ss += (v - mean) * (v - mean);
    }
    curve.means[level] = mean;
    curve.stderrs[level] =
        count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
  }
  return curve;
}

SweepDiagnostics sweep_diagnostics(const SweepCurve& curve) {
  if (curve.means.size() == 0) {
    fail(errc::invalid_config, "diagnostics need a nonempty curve");
  }
  SweepDiagnostics diag;
  diag.isotonic_fit = isotonic_nonincreasing(curve.means);
  const double range = curve.means.maxCoeff() - curve.means.minCoeff();
  const double rms =
      std::sqrt((curve.means - diag.isotonic_fit).squaredNorm() /
                static_cast<double>(curve.means.size()));
  diag.isotonic_residual_fraction = range > 0.0 ? rms / range : 0.0;

  const Index interior = std::max<Index>(0, curve.means.size() - 2);
  diag.second_differences.resize(interior);
  diag.second_difference_stderr.resize(interior);
  double min_ratio = std::numeric_limits<double>::infinity();
  for (Index i = 1; i + 1 < curve.means.size(); ++i) {
    const double d2 =
        curve.means[i + 1] - 2.0 * curve.means[i] + curve.means[i - 1];
    const double se = std::sqrt(curve.stderrs[i + 1] * curve.stderrs[i + 1] +
                                4.0 * curve.stderrs[i] * curve.stderrs[i] +
                                curve.stderrs[i - 1] * curve.stderrs[i - 1]);
    diag.second_differences[i - 1] = d2;
    diag.second_difference_stderr[i - 1] = se;
    const double ratio =
        se > 0.0 ? d2 / se
                 : (d2 >= 0.0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity());
    min_ratio = std::min(min_ratio, ratio);
  }
  diag.min_convexity_ratio = min_ratio;
  return diag;
}

void cmd_simulate(const RunConfig& cfg) {
  const ReportTimer timer;
  PartitionModelConfig model = cfg.dataset.model;
  model.seed = cfg.seed;
  const ClusteredDataset data = generate_partition_model(model);
  save_csv(data, out_path(cfg, "dataset.csv"));

  const Index train = cfg.simulate.oracle_train > 0 ? cfg.simulate.oracle_train
                                                    : model.n_train;
  const Index eval = cfg.simulate.oracle_eval > 0 ? cfg.simulate.oracle_eval
                                                  : model.n_valid;
  const OracleEstimate oracle =
      partition_oracle_e0(model, cfg.learner, cfg.loss, train, eval,
                          cfg.simulate.oracle_reps, cfg.seed);
  const json oracle_json{{"value", oracle.value},
                         {"std_error", oracle.std_error},
                         {"reps", oracle.reps},
                         {"train_size", train},
                         {"eval_size", eval}};
  const json sidecar{{"schema", kReportSchema},
                     {"version", kArtifactVersion},
                     {"seed", cfg.seed},
                     {"model", model_json(model)},
                     {"learner", learner_json(cfg.learner)},
                     {"loss", loss_name(cfg.loss)},
                     {"rows", data.rows()},
                     {"oracle", oracle_json}};
  write_text_file(out_path(cfg, "dataset.json"), sidecar.dump(2) + "\n");

  const json result{{"rows", data.rows()},
                    {"columns", data.cols()},
                    {"oracle", oracle_json},
                    {"outputs", json{{"dataset", "dataset.csv"},
                                     {"sidecar", "dataset.json"}}}};
  emit_report(cfg, "simulate", result, timer);
  std::cout << "dataset.csv: " << data.rows() << " rows, " << data.cols()
            << " feature columns; oracle e0 = " << oracle.value << " (se "
            << oracle.std_error << ")\n";
}

void cmd_estimate(const RunConfig& cfg) {
  const ReportTimer timer;
  const ClusteredDataset data = load_or_simulate(cfg);
  const EstimateOptions& opt = cfg.estimate;

  json result;
  double e0 = 0.0;
  if (opt.method == "iid") {
    e0 = estimate_naive_iid(data, cfg.learner, cfg.loss, opt.folds, cfg.seed);
    result = json{{"method", opt.method}, {"e0_hat", e0},
                  {"folds", opt.folds}};
  } else if (opt.method == "loco") {
    e0 = estimate_loco(data, opt.use_approx, cfg.learner, cfg.loss,
                       opt.held_out_cluster);
    result = json{{"method", opt.method},
                  {"e0_hat", e0},
                  {"held_out_cluster", opt.held_out_cluster},
                  {"use_approx", opt.use_approx}};
  } else if (opt.method == "b3-exact" || opt.method == "b3-t4mono" ||
             opt.method == "b3-basis" || opt.method == "b3-sketch") {
    B3Config b3 = opt.b3;
    b3.solver = method_from_name(opt.method.substr(3));
    b3.learner = cfg.learner;
    b3.loss = cfg.loss;
    b3.seed = cfg.seed;
    b3.threads = cfg.threads;
    const SplitPair split =
        loco_split(data, opt.held_out_cluster, opt.use_approx);
    const CorruptedSplit corrupted =
        make_corrupted(split, opt.leak, opt.p0, opt.direction, cfg.seed);
    const LossCurveEstimate est = b3_run(corrupted, data, b3);
    e0 = est.e0_hat;
    write_text_file(out_path(cfg, "curve.csv"), curve_csv(est.trace));
    result = json{
        {"method", opt.method},
        {"e0_hat", est.e0_hat},
        {"residual", est.residual},
        {"p0", corrupted.p0},
        {"n_prime", b3.n_prime},
        {"grid", vec_json(est.trace.grid.levels)},
        {"b_bar", vec_json(est.trace.b_bar)},
        {"curve", vec_json(est.curve)},
        {"fit_failures", est.trace.fit_failures},
        {"nonconverged_fits", est.trace.nonconverged_fits},
        {"solve", json{{"converged", est.solve.converged},
                       {"iterations", est.solve.iterations},
                       {"condition_estimate", est.solve.condition_estimate},
                       {"rank_deficient", est.solve.rank_deficient},
                       {"kkt_residual", est.solve.kkt_residual}}},
        {"outputs", json{{"curve", "curve.csv"}}}};
    if (b3.solver == EstimatorMethod::basis) {
      result["coefficients"] = vec_json(est.coefficients);
    }
    if (b3.solver == EstimatorMethod::sketch) {
      result["error_bound"] = est.error_bound;
    }
  } else {
    fail(errc::invalid_config,
         "unknown method '" + opt.method +
             "'; expected iid, loco, b3-exact, b3-t4mono, b3-basis or "
             "b3-sketch");
  }
  emit_report(cfg, "estimate", result, timer);
  std::cout << opt.method << ": e0_hat = " << e0 << "\n";
}

void cmd_sweep(const RunConfig& cfg) {
  const ReportTimer timer;
  const ClusteredDataset data = load_or_simulate(cfg);
  const SplitPair split =
      loco_split(data, cfg.sweep.held_out_cluster, cfg.sweep.use_approx);
  const SweepCurve curve = run_sweep(data, split, cfg.sweep, cfg.learner,
                                     cfg.loss, cfg.seed, cfg.threads);
  const SweepDiagnostics diag = sweep_diagnostics(curve);
  write_text_file(out_path(cfg, "curve.csv"),
                  sweep_csv(curve.levels, curve.means, curve.stderrs));
  const json result{
      {"levels", vec_json(curve.levels)},
      {"means", vec_json(curve.means)},
      {"stderrs", vec_json(curve.stderrs)},
      {"trials", cfg.sweep.trials},
      {"isotonic_fit", vec_json(diag.isotonic_fit)},
      {"isotonic_residual_fraction", diag.isotonic_residual_fraction},
      {"second_differences", vec_json(diag.second_differences)},
      {"second_difference_stderr", vec_json(diag.second_difference_stderr)},
      {"min_convexity_ratio", diag.min_convexity_ratio},
      {"outputs", json{{"curve", "curve.csv"}}}};
  emit_report(cfg, "sweep", result, timer);
  std::cout << "sweep: " << cfg.sweep.points << " levels x "
            << cfg.sweep.trials
            << " trials; isotonic residual fraction = "
            << diag.isotonic_residual_fraction
            << ", min convexity ratio = " << diag.min_convexity_ratio << "\n";
}

void cmd_test(const RunConfig& cfg) {
  const ReportTimer timer;
  const ClusteredDataset data = load_or_simulate(cfg);
  const SplitPair split =
      loco_split(data, cfg.test.held_out_cluster, cfg.test.use_approx);
  const CorruptedSplit corrupted = make_corrupted(
      split, cfg.test.leak, cfg.test.p0, cfg.test.direction, cfg.seed);
  TTestConfig tc = cfg.test.ttest;
  tc.learner = cfg.learner;
  tc.loss = cfg.loss;
  tc.seed = cfg.seed;
  const TestFolds folds = make_test_folds(corrupted, tc);
  const TestResult res = leakage_test(data, corrupted, tc);
  const json result{
      {"t_stat", res.t_stat},
      {"dof", res.dof},
      {"p_value", res.p_value},
      {"reject", res.reject},
      {"alpha", res.alpha},
      {"z_means", json::array({res.z_means.first, res.z_means.second})},
      {"z_vars", json::array({res.z_vars.first, res.z_vars.second})},
      {"fold_counts",
       json::array({res.fold_counts.first, res.fold_counts.second})},
      {"fold_train", folds.fold_train},
      {"fold_valid", folds.fold_valid},
      {"p0", corrupted.p0}};
  emit_report(cfg, "test", result, timer);
  if (res.reject) {
    std::cout << "reject H0 (no out-of-cluster gap): T-hat-trained folds "
                 "lose significantly more on V-hat";
  } else {
    std::cout << "fail to reject H0 (no out-of-cluster gap): fold losses "
                 "are statistically exchangeable";
  }
  std::cout << "; p = " << res.p_value << " (t = " << res.t_stat
            << ", dof = " << res.dof << ", alpha = " << res.alpha << ")\n";
}

void cmd_bench(const RunConfig& cfg) {
  const ReportTimer timer;
  const std::vector<BenchRow> rows = run_solver_bench(cfg.bench);
  write_text_file(out_path(cfg, "bench.csv"), bench_csv(rows));
  json jrows = json::array();
  for (const BenchRow& row : rows) {
    jrows.push_back(json{{"method", method_name(row.method)},
                         {"n_prime", row.n_prime},
                         {"seconds", row.seconds},
                         {"failed", row.failed}});
    std::cout << method_name(row.method) << " n'=" << row.n_prime << ": "
              << row.seconds << " s" << (row.failed ? " [failed]" : "")
              << "\n";
  }
  const json result{{"rows", jrows},
                    {"reps", cfg.bench.reps},
                    {"outputs", json{{"bench", "bench.csv"}}}};
  emit_report(cfg, "bench", result, timer);
}

namespace {

int emit_error(const RunConfig& cfg, errc code, const std::string& message) {
  const json err{{"schema", kReportSchema},
                 {"version", kArtifactVersion},
                 {"error", json{{"code", errc_name(code)},
                                {"exit_code", exit_code_for(code)},
                                {"message", message}}}};
  std::cerr << err.dump() << "\n";
  try {
    write_text_file(out_path(cfg, "error.json"), err.dump(2) + "\n");
  } catch (...) {
    // the error report on stderr is the contract; the file is best effort
  }
  return exit_code_for(code);
}

}  // namespace

int run_cli(const std::string& command, const std::string& config_path,
            const CliOverrides& overrides) {
  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_run_config(config_path);
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.threads) cfg.threads = *overrides.threads;
    if (overrides.out) cfg.out = *overrides.out;
    if (command == "simulate") {
      cmd_simulate(cfg);
    } else if (command == "estimate") {
      cmd_estimate(cfg);
    } else if (command == "sweep") {
      cmd_sweep(cfg);
    } else if (command == "test") {
      cmd_test(cfg);
    } else if (command == "bench") {
      cmd_bench(cfg);
    } else {
      fail(errc::invalid_config, "unknown command '" + command + "'");
    }
    return 0;
  } catch (const Error& e) {
    return emit_error(cfg, e.code(), e.what());
  } catch (const std::exception& e) {
    return emit_error(cfg, errc::numerical_failure,
                      std::string("unexpected failure: ") + e.what());
  }
}

}  // namespace ooc
