// Command-line front end: gen / split / train / bench / gridsearch.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 training
// divergence, 4 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lfa/bench.hpp"
#include "lfa/common.hpp"
#include "lfa/controllers.hpp"
#include "lfa/data.hpp"
#include "lfa/eval.hpp"
#include "lfa/gridsearch.hpp"
#include "lfa/model.hpp"
#include "lfa/synth.hpp"
#include "lfa/trainer.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct DataOptions {
  std::string path;
  std::string delimiter = "auto";
  std::string index_base = "auto";
};

struct SplitOptions {
  std::vector<double> fractions = {0.7, 0.2, 0.1};
  std::uint64_t seed = 42;
  int kfold = 0;   // 0 = fraction split
  int fold = 0;
};

struct ModelOptions {
  std::int64_t f = 20;
  double eta = 0.01;
  double lambda = 0.05;
  double init_scale = 0.1;
  std::uint64_t init_seed = 1;
};

struct RefinerOptions {
  std::string controller = "sgd";
  double adrc_h = 0.1;
  double adrc_r = 10;
  double adrc_omega = 2;
  double adrc_b = 0.5;
  double adrc_b0 = 1;
  double adrc_b1 = 1;
  double adrc_b2 = 0.01;
  bool adrc_warm_start = false;
  double pid_kp = 1;
  double pid_ki = 0.005;
  double pid_kd = 0.1;
};

struct TrainingOptions {
  std::size_t max_epochs = 1000;
  double tol = 1e-5;
  bool no_shuffle = false;
  std::uint64_t shuffle_seed = 0;
  std::string stop_metric = "validation";
  bool clamp = false;
};

struct OutputOptions {
  std::string history_path;
  std::string summary_path;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--data", o.path, "rating file, one instance per line")
      ->required()
      ->envname("LFA_DATA");
  cmd->add_option("--delimiter", o.delimiter, "auto|tab|comma|colons|ws")
      ->check(CLI::IsMember({"auto", "tab", "comma", "colons", "ws"}))
      ->envname("LFA_DELIMITER");
  cmd->add_option("--index-base", o.index_base, "auto|0|1")
      ->check(CLI::IsMember({"auto", "0", "1"}))
      ->envname("LFA_INDEX_BASE");
}

void add_split_options(CLI::App* cmd, SplitOptions& o) {
  cmd->add_option("--fractions", o.fractions, "train,test,validation fractions")
      ->delimiter(',')
      ->expected(3)
      ->envname("LFA_FRACTIONS");
  cmd->add_option("--split-seed", o.seed, "permutation seed for the split")
      ->envname("LFA_SPLIT_SEED");
  cmd->add_option("--kfold", o.kfold, "number of folds (overrides --fractions)")
      ->envname("LFA_KFOLD");
  cmd->add_option("--fold", o.fold, "fold index when --kfold is set")->envname("LFA_FOLD");
}

void add_model_options(CLI::App* cmd, ModelOptions& o) {
  cmd->add_option("--f", o.f, "latent dimension")->envname("LFA_F");
  cmd->add_option("--eta", o.eta, "learning rate")->envname("LFA_ETA");
  cmd->add_option("--lambda", o.lambda, "regularization coefficient")->envname("LFA_LAMBDA");
  cmd->add_option("--init-scale", o.init_scale, "factor init upper bound")
      ->envname("LFA_INIT_SCALE");
  cmd->add_option("--init-seed", o.init_seed, "factor init seed")->envname("LFA_INIT_SEED");
}

void add_refiner_options(CLI::App* cmd, RefinerOptions& o) {
  cmd->add_option("--controller", o.controller, "sgd|pid|adrc error refiner")
      ->check(CLI::IsMember({"sgd", "pid", "adrc"}))
      ->envname("LFA_CONTROLLER");
  cmd->add_option("--adrc.h", o.adrc_h, "integration step")->envname("LFA_ADRC_H");
  cmd->add_option("--adrc.r", o.adrc_r, "differentiator acceleration")->envname("LFA_ADRC_R");
  cmd->add_option("--adrc.omega", o.adrc_omega,
                  "observer bandwidth (beta1=3w, beta2=3w^2, beta3=w^3)")
      ->envname("LFA_ADRC_OMEGA");
  cmd->add_option("--adrc.b", o.adrc_b, "observer input coefficient")->envname("LFA_ADRC_B");
  cmd->add_option("--adrc.b0", o.adrc_b0, "compensation divisor")->envname("LFA_ADRC_B0");
  cmd->add_option("--adrc.b1", o.adrc_b1, "proportional gain")->envname("LFA_ADRC_B1");
  cmd->add_option("--adrc.b2", o.adrc_b2, "differential gain")->envname("LFA_ADRC_B2");
  cmd->add_flag("--adrc.warm-start", o.adrc_warm_start,
                "start v1 at the rating and z1 at the first prediction")
      ->envname("LFA_ADRC_WARM_START");
  cmd->add_option("--pid.kp", o.pid_kp, "proportional gain")->envname("LFA_PID_KP");
  cmd->add_option("--pid.ki", o.pid_ki, "integral gain")->envname("LFA_PID_KI");
  cmd->add_option("--pid.kd", o.pid_kd, "derivative gain")->envname("LFA_PID_KD");
}

void add_training_options(CLI::App* cmd, TrainingOptions& o) {
  cmd->add_option("--max-epochs", o.max_epochs, "epoch budget")->envname("LFA_MAX_EPOCHS");
  cmd->add_option("--tol", o.tol, "consecutive-RMSE stop threshold")->envname("LFA_TOL");
  cmd->add_flag("--no-shuffle", o.no_shuffle, "visit instances in dataset order")
      ->envname("LFA_NO_SHUFFLE");
  cmd->add_option("--shuffle-seed", o.shuffle_seed, "per-epoch shuffle seed")
      ->envname("LFA_SHUFFLE_SEED");
  cmd->add_option("--stop-metric", o.stop_metric, "validation|train")
      ->check(CLI::IsMember({"validation", "train"}))
      ->envname("LFA_STOP_METRIC");
  cmd->add_flag("--clamp", o.clamp, "clamp reported predictions to the training rating range")
      ->envname("LFA_CLAMP");
}

lfa::ParseFormat make_format(const DataOptions& o) {
  lfa::ParseFormat fmt;
  if (o.delimiter == "tab") fmt.delimiter = lfa::Delimiter::Tab;
  else if (o.delimiter == "comma") fmt.delimiter = lfa::Delimiter::Comma;
  else if (o.delimiter == "colons") fmt.delimiter = lfa::Delimiter::DoubleColon;
  else if (o.delimiter == "ws") fmt.delimiter = lfa::Delimiter::Whitespace;
  if (o.index_base == "0") fmt.index_base = lfa::IndexBase::Zero;
  else if (o.index_base == "1") fmt.index_base = lfa::IndexBase::One;
  return fmt;
}

lfa::HdiDataset load_dataset(const DataOptions& o) {
  std::ifstream in(o.path);
  if (!in) throw lfa::ConfigError("cannot open data file: " + o.path);
  auto res = lfa::parse_ratings(in, make_format(o));
  if (res.duplicate_count > 0)
    std::cerr << "warning: " << res.duplicate_count << " duplicate (row, col) pairs, kept last\n";
  return std::move(res.dataset);
}

lfa::DataSplit make_split(const lfa::HdiDataset& ds, const SplitOptions& o) {
  if (o.kfold > 0) {
    auto splits = lfa::kfold(ds, static_cast<std::size_t>(o.kfold), o.seed);
    if (o.fold < 0 || static_cast<std::size_t>(o.fold) >= splits.size())
      throw lfa::ConfigError("--fold out of range for --kfold " + std::to_string(o.kfold));
    return std::move(splits[static_cast<std::size_t>(o.fold)]);
  }
  return lfa::split_dataset(ds, {o.fractions[0], o.fractions[1], o.fractions[2]}, o.seed);
}

lfa::TrainConfig make_train_config(const ModelOptions& m, const RefinerOptions& r,
                                   const TrainingOptions& t) {
  lfa::TrainConfig config;
  config.hyper = {.eta = m.eta, .lambda = m.lambda};
  config.latent_dim = m.f;
  config.init_scale = m.init_scale;
  config.max_epochs = t.max_epochs;
  config.tol = t.tol;
  config.shuffle = {.enabled = !t.no_shuffle, .seed = t.shuffle_seed};
  config.stop_metric =
      t.stop_metric == "train" ? lfa::StopMetric::Train : lfa::StopMetric::Validation;

  if (r.controller == "pid") {
    config.refiner.kind = lfa::RefinerKind::Pid;
    config.refiner.pid = {.kp = r.pid_kp, .ki = r.pid_ki, .kd = r.pid_kd};
  } else if (r.controller == "adrc") {
    config.refiner.kind = lfa::RefinerKind::Adrc;
    lfa::AdrcGains g;
    g.h = r.adrc_h;
    g.td_accel = r.adrc_r;
    g.set_bandwidth(r.adrc_omega);
    g.b = r.adrc_b;
    g.b0 = r.adrc_b0;
    g.b1 = r.adrc_b1;
    g.b2 = r.adrc_b2;
    config.refiner.adrc = g;
    config.refiner.adrc_init = r.adrc_warm_start ? lfa::AdrcInit::WarmStart : lfa::AdrcInit::Zero;
  }
  return config;
}

json config_to_json(const lfa::TrainConfig& c) {
  json j;
  j["eta"] = c.hyper.eta;
  j["lambda"] = c.hyper.lambda;
  j["f"] = c.latent_dim;
  j["init_scale"] = c.init_scale;
  j["max_epochs"] = c.max_epochs;
  j["tol"] = c.tol;
  j["shuffle"] = c.shuffle.enabled;
  j["shuffle_seed"] = c.shuffle.seed;
  j["stop_metric"] = c.stop_metric == lfa::StopMetric::Train ? "train" : "validation";
  switch (c.refiner.kind) {
    case lfa::RefinerKind::PassThrough: j["controller"] = "sgd"; break;
    case lfa::RefinerKind::Pid:
      j["controller"] = "pid";
      j["pid"] = {{"kp", c.refiner.pid.kp}, {"ki", c.refiner.pid.ki}, {"kd", c.refiner.pid.kd}};
      break;
    case lfa::RefinerKind::Adrc:
      j["controller"] = "adrc";
      j["adrc"] = {{"h", c.refiner.adrc.h},       {"r", c.refiner.adrc.td_accel},
                   {"beta1", c.refiner.adrc.beta1}, {"beta2", c.refiner.adrc.beta2},
                   {"beta3", c.refiner.adrc.beta3}, {"b", c.refiner.adrc.b},
                   {"b0", c.refiner.adrc.b0},     {"b1", c.refiner.adrc.b1},
                   {"b2", c.refiner.adrc.b2}};
      break;
  }
  return j;
}

void write_history_csv(const std::vector<lfa::EpochRecord>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw lfa::IoError("cannot write history file: " + path);
  out << "epoch,train_rmse,valid_rmse,elapsed_ms\n";
  for (const auto& rec : history)
    out << rec.epoch << ',' << lfa::format_double(rec.train_rmse) << ','
        << lfa::format_double(rec.valid_rmse) << ',' << lfa::format_double(rec.elapsed_ms)
        << '\n';
}

double clamped_rmse(const lfa::FactorModel& model, const lfa::HdiDataset& ds, double lo,
                    double hi) {
  if (ds.empty()) throw lfa::EvalError("rmse on empty dataset");
  lfa::CompensatedSum sum;
  for (const auto& inst : ds.instances) {
    double p = std::clamp(model.predict(inst.row_id, inst.col_id), lo, hi);
    double e = inst.value - p;
    sum.add(e * e);
  }
  return std::sqrt(sum.value() / static_cast<double>(ds.size()));
}

// ---- subcommands ----------------------------------------------------------

int cmd_gen(const lfa::SynthSpec& spec, std::uint64_t seed, const std::string& out_path) {
  auto ds = lfa::generate_synthetic(spec, seed);
  std::ofstream out(out_path);
  if (!out) throw lfa::IoError("cannot write: " + out_path);
  lfa::serialize(ds, out);
  std::cout << "wrote " << ds.size() << " instances (" << ds.num_rows << " x " << ds.num_cols
            << ", density " << lfa::density(ds) << ") to " << out_path << "\n";
  return kExitOk;
}

int cmd_split(const DataOptions& data, const SplitOptions& split_opts,
              const std::string& out_prefix) {
  auto ds = load_dataset(data);
  auto split = make_split(ds, split_opts);
  struct Part {
    const char* name;
    const lfa::HdiDataset* part;
  } parts[] = {{"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
  for (const auto& [name, part] : parts) {
    std::string path = out_prefix + "." + name + ".tsv";
    std::ofstream out(path);
    if (!out) throw lfa::IoError("cannot write: " + path);
    lfa::serialize(*part, out);
    std::cout << name << ": " << part->size() << " instances -> " << path << "\n";
  }
  std::cout << "source density: " << lfa::density(ds) << "\n";
  return kExitOk;
}

int cmd_train(const DataOptions& data, const SplitOptions& split_opts, const ModelOptions& model,
              const RefinerOptions& refiner, const TrainingOptions& training,
              const OutputOptions& output, const std::string& checkpoint_path) {
  auto ds = load_dataset(data);
  auto split = make_split(ds, split_opts);
  auto config = make_train_config(model, refiner, training);

  auto result = lfa::fit(split.train, split.validation, config, model.init_seed);

  if (!output.history_path.empty()) write_history_csv(result.history, output.history_path);

  json summary;
  summary["config"] = config_to_json(config);
  summary["stop_reason"] = lfa::to_string(result.stop_reason);
  summary["epochs"] = result.history.size();
  summary["best_valid_rmse"] = result.best_valid_rmse();
  summary["best_valid_epoch"] = result.best_valid_epoch();
  if (!result.history.empty()) {
    summary["final_train_rmse"] = result.history.back().train_rmse;
    summary["final_valid_rmse"] = result.history.back().valid_rmse;
    summary["total_seconds"] = result.history.back().elapsed_ms / 1000.0;
  }
  if (result.model && !split.test.empty()) {
    summary["test_rmse"] =
        training.clamp
            ? clamped_rmse(*result.model, split.test, split.train.value_min, split.train.value_max)
            : lfa::rmse(*result.model, split.test);
  }
  if (result.stop_reason == lfa::StopReason::Divergence)
    summary["divergence"] = result.divergence_detail;

  if (!output.summary_path.empty()) {
    std::ofstream out(output.summary_path);
    if (!out) throw lfa::IoError("cannot write summary: " + output.summary_path);
    out << summary.dump(2) << "\n";
  }
  if (!checkpoint_path.empty() && result.model) {
    std::ofstream out(checkpoint_path);
    if (!out) throw lfa::IoError("cannot write checkpoint: " + checkpoint_path);
    lfa::save_model(*result.model, out);
  }

  std::cout << summary.dump(2) << "\n";
  return result.stop_reason == lfa::StopReason::Divergence ? kExitDivergence : kExitOk;
}

struct BenchSpecText {
  std::string text;
};

// Model spec syntax: kind[:key=value,...], e.g. "adrc:omega=5,b2=0.01,eta=0.002".
lfa::BenchModelSpec parse_model_spec(const std::string& text, const ModelOptions& model,
                                     const RefinerOptions& refiner,
                                     const TrainingOptions& training, int ordinal) {
  std::string kind = text;
  std::string params;
  if (auto pos = text.find(':'); pos != std::string::npos) {
    kind = text.substr(0, pos);
    params = text.substr(pos + 1);
  }
  if (kind != "sgd" && kind != "pid" && kind != "adrc")
    throw lfa::ConfigError("model spec must start with sgd|pid|adrc: " + text);

  RefinerOptions r = refiner;
  ModelOptions m = model;
  r.controller = kind;
  std::istringstream stream(params);
  std::string kv;
  while (std::getline(stream, kv, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw lfa::ConfigError("bad model spec parameter: " + kv);
    std::string key = kv.substr(0, eq);
    double value = lfa::parse_double(kv.substr(eq + 1), 0);
    if (key == "eta") m.eta = value;
    else if (key == "lambda") m.lambda = value;
    else if (key == "f") m.f = static_cast<std::int64_t>(value);
    else if (key == "h") r.adrc_h = value;
    else if (key == "r") r.adrc_r = value;
    else if (key == "omega") r.adrc_omega = value;
    else if (key == "b") r.adrc_b = value;
    else if (key == "b0") r.adrc_b0 = value;
    else if (key == "b1") r.adrc_b1 = value;
    else if (key == "b2") r.adrc_b2 = value;
    else if (key == "kp") r.pid_kp = value;
    else if (key == "ki") r.pid_ki = value;
    else if (key == "kd") r.pid_kd = value;
    else throw lfa::ConfigError("unknown model spec key '" + key + "'");
  }
  lfa::BenchModelSpec spec;
  spec.name = kind + "#" + std::to_string(ordinal);
  spec.config = make_train_config(m, r, training);
  return spec;
}

int cmd_bench(const DataOptions& data, const SplitOptions& split_opts,
              const std::vector<std::string>& model_specs, const ModelOptions& model,
              const RefinerOptions& refiner, const TrainingOptions& training, double target,
              const std::string& json_path) {
  auto ds = load_dataset(data);
  auto split = make_split(ds, split_opts);

  std::vector<lfa::BenchModelSpec> specs;
  int ordinal = 0;
  for (const auto& text : model_specs)
    specs.push_back(parse_model_spec(text, model, refiner, training, ordinal++));

  // With no explicit target, the first model is the reference: its lowest
  // validation RMSE becomes the shared epochs-to-target threshold.
  if (!std::isfinite(target)) {
    auto probe = lfa::run_benchmark(split, {specs.front()}, model.init_seed);
    target = probe.rows.front().lowest_valid_rmse;
  }
  auto report = lfa::run_benchmark(split, specs, model.init_seed, target);

  json j;
  j["target_valid_rmse"] = report.target_valid_rmse;
  for (const auto& row : report.rows) {
    json rj;
    rj["name"] = row.name;
    rj["diverged"] = row.diverged;
    if (row.diverged) rj["divergence"] = row.divergence_detail;
    rj["lowest_test_rmse"] = row.lowest_test_rmse;
    rj["final_test_rmse"] = row.final_test_rmse;
    rj["lowest_valid_rmse"] = row.lowest_valid_rmse;
    rj["best_valid_epoch"] = row.best_valid_epoch;
    rj["epochs_run"] = row.epochs_run;
    rj["total_seconds"] = row.total_seconds;
    rj["epochs_to_target"] = row.epochs_to_target;
    j["models"].push_back(rj);
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) throw lfa::IoError("cannot write bench report: " + json_path);
    out << j.dump(2) << "\n";
  }

  std::cout << std::left << std::setw(12) << "model" << std::right << std::setw(14)
            << "low RMSE" << std::setw(14) << "low vRMSE" << std::setw(10) << "epochs"
            << std::setw(12) << "secs" << std::setw(12) << "to-target" << "\n";
  for (const auto& row : report.rows) {
    std::cout << std::left << std::setw(12) << row.name << std::right;
    if (row.diverged) {
      std::cout << std::setw(14) << "diverged" << "\n";
      continue;
    }
    std::cout << std::setw(14) << std::fixed << std::setprecision(4) << row.lowest_test_rmse
              << std::setw(14) << row.lowest_valid_rmse << std::setw(10) << row.epochs_run
              << std::setw(12) << std::setprecision(2) << row.total_seconds << std::setw(12)
              << row.epochs_to_target << "\n";
    std::cout.unsetf(std::ios::fixed);
  }
  return kExitOk;
}

lfa::GridAxes parse_grid(const std::string& text) {
  lfa::GridAxes axes;
  std::istringstream stream(text);
  std::string axis;
  while (std::getline(stream, axis, ';')) {
    if (axis.empty()) continue;
    auto eq = axis.find('=');
    if (eq == std::string::npos) throw lfa::ConfigError("bad grid axis: " + axis);
    std::string key = axis.substr(0, eq);
    std::vector<double> values;
    std::istringstream vals(axis.substr(eq + 1));
    std::string v;
    while (std::getline(vals, v, ',')) values.push_back(lfa::parse_double(v, 0));
    axes[key] = std::move(values);
  }
  if (axes.empty()) throw lfa::ConfigError("empty grid spec");
  return axes;
}

int cmd_gridsearch(const DataOptions& data, const SplitOptions& split_opts,
                   const ModelOptions& model, const RefinerOptions& refiner,
                   const TrainingOptions& training, const std::string& grid_text,
                   unsigned workers, const std::string& out_path) {
  auto ds = load_dataset(data);
  auto split = make_split(ds, split_opts);
  auto base = make_train_config(model, refiner, training);
  auto axes = parse_grid(grid_text);
  auto points = lfa::grid_search(split.train, split.validation, base, axes, model.init_seed,
                                 workers);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw lfa::IoError("cannot write gridsearch output: " + out_path);
    out = &file;
  }
  *out << "rank";
  for (const auto& [key, _] : axes) *out << ',' << key;
  *out << ",lowest_valid_rmse,best_valid_epoch,epochs_run,diverged\n";
  int rank = 1;
  for (const auto& pt : points) {
    *out << rank++;
    for (const auto& [key, _] : axes) *out << ',' << lfa::format_double(pt.values.at(key));
    *out << ',' << lfa::format_double(pt.lowest_valid_rmse) << ',' << pt.best_valid_epoch << ','
         << pt.epochs_run << ',' << (pt.diverged ? 1 : 0) << '\n';
  }
  if (!out_path.empty())
    std::cout << "wrote " << points.size() << " ranked grid points to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent factor analysis of sparse rating matrices with "
               "controller-refined SGD training"};
  app.require_subcommand(1);
  app.set_config("--config")->envname("LFA_CONFIG");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic low-rank rating file");
  lfa::SynthSpec synth;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "ratings.tsv";
  gen->add_option("--rows", synth.rows);
  gen->add_option("--cols", synth.cols);
  gen->add_option("--rank", synth.rank);
  gen->add_option("--density", synth.density);
  gen->add_option("--noise", synth.noise);
  gen->add_option("--factor-lo", synth.factor_lo);
  gen->add_option("--factor-hi", synth.factor_hi);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out);

  // split
  auto* split_cmd = app.add_subcommand("split", "split a rating file into train/validation/test");
  DataOptions split_data;
  SplitOptions split_split;
  std::string split_prefix = "split";
  add_data_options(split_cmd, split_data);
  add_split_options(split_cmd, split_split);
  split_cmd->add_option("--out-prefix", split_prefix, "output file prefix");

  // train
  auto* train_cmd = app.add_subcommand("train", "train one model and emit history + summary");
  DataOptions train_data;
  SplitOptions train_split;
  ModelOptions train_model;
  RefinerOptions train_refiner;
  TrainingOptions train_training;
  OutputOptions train_output;
  std::string checkpoint_path;
  add_data_options(train_cmd, train_data);
  add_split_options(train_cmd, train_split);
  add_model_options(train_cmd, train_model);
  add_refiner_options(train_cmd, train_refiner);
  add_training_options(train_cmd, train_training);
  train_cmd->add_option("--history", train_output.history_path, "per-epoch CSV output");
  train_cmd->add_option("--summary", train_output.summary_path, "run summary JSON output");
  train_cmd->add_option("--checkpoint", checkpoint_path, "final factor checkpoint output");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "train several models on the same split");
  DataOptions bench_data;
  SplitOptions bench_split;
  ModelOptions bench_model;
  RefinerOptions bench_refiner;
  TrainingOptions bench_training;
  std::vector<std::string> bench_specs;
  double bench_target = std::numeric_limits<double>::quiet_NaN();
  std::string bench_json;
  add_data_options(bench_cmd, bench_data);
  add_split_options(bench_cmd, bench_split);
  add_model_options(bench_cmd, bench_model);
  add_refiner_options(bench_cmd, bench_refiner);
  add_training_options(bench_cmd, bench_training);
  bench_cmd->add_option("--model", bench_specs, "model spec kind[:key=val,...]; repeatable")
      ->required();
  bench_cmd->add_option("--target", bench_target,
                        "validation RMSE target for epochs-to-target (default: first model's best)");
  bench_cmd->add_option("--json", bench_json, "bench report JSON output");

  // gridsearch
  auto* grid_cmd = app.add_subcommand("gridsearch", "rank hyperparameter grid points");
  DataOptions grid_data;
  SplitOptions grid_split;
  ModelOptions grid_model;
  RefinerOptions grid_refiner;
  TrainingOptions grid_training;
  std::string grid_text;
  std::string grid_out;
  unsigned grid_workers = 1;
  add_data_options(grid_cmd, grid_data);
  add_split_options(grid_cmd, grid_split);
  add_model_options(grid_cmd, grid_model);
  add_refiner_options(grid_cmd, grid_refiner);
  add_training_options(grid_cmd, grid_training);
  grid_cmd->add_option("--grid", grid_text, "axes, e.g. omega=1,5,25;b2=0,0.01")->required();
  grid_cmd->add_option("--out", grid_out, "ranked CSV output");
  grid_cmd->add_option("--workers", grid_workers, "concurrent grid workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen(synth, gen_seed, gen_out);
    if (split_cmd->parsed()) return cmd_split(split_data, split_split, split_prefix);
    if (train_cmd->parsed())
      return cmd_train(train_data, train_split, train_model, train_refiner, train_training,
                       train_output, checkpoint_path);
    if (bench_cmd->parsed())
      return cmd_bench(bench_data, bench_split, bench_specs, bench_model, bench_refiner,
                       bench_training, bench_target, bench_json);
    if (grid_cmd->parsed())
      return cmd_gridsearch(grid_data, grid_split, grid_model, grid_refiner, grid_training,
                            grid_text, grid_workers, grid_out);
  } catch (const lfa::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const lfa::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const lfa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lfa::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
