#ifndef LFA_TRAINER_HPP_
#define LFA_TRAINER_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lfa/common.hpp"
#include "lfa/controllers.hpp"
#include "lfa/data.hpp"
#include "lfa/eval.hpp"
#include "lfa/model.hpp"

namespace lfa {

enum class StopMetric { Validation, Train };

enum class StopReason { MaxEpochs, Tolerance, Divergence };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxEpochs: return "max-epochs";
    case StopReason::Tolerance: return "tolerance";
    case StopReason::Divergence: return "divergence";
  }
  return "?";
}

struct ShuffleSpec {
  bool enabled = true;
  std::uint64_t seed = 0;
};

struct RefinerSpec {
  RefinerKind kind = RefinerKind::PassThrough;
  AdrcGains adrc;
  PidGains pid;
  AdrcInit adrc_init = AdrcInit::Zero;

  ControllerBank make_bank(std::size_t num_instances) const {
    switch (kind) {
      case RefinerKind::PassThrough: return ControllerBank::pass_through();
      case RefinerKind::Pid: return ControllerBank::pid(pid, num_instances);
      case RefinerKind::Adrc: return ControllerBank::adrc(adrc, num_instances, adrc_init);
    }
    throw ConfigError("unknown refiner kind");
  }
};

struct TrainConfig {
  LfaHyper hyper;
  RefinerSpec refiner;
  std::int64_t latent_dim = 20;
  double init_scale = 0.1;
  std::size_t max_epochs = 1000;
  double tol = 1e-5;  // consecutive-RMSE delta threshold
  ShuffleSpec shuffle;
  StopMetric stop_metric = StopMetric::Validation;

  void validate() const {
    hyper.validate();
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (tol < 0) throw ConfigError("tol must be nonnegative");
    if (latent_dim < 1) throw ConfigError("latent dimension must be >= 1");
    if (!(init_scale > 0)) throw ConfigError("init_scale must be positive");
  }
};

struct EpochRecord {
  std::size_t epoch;  // 1-based
  double train_rmse;
  double valid_rmse;
  double elapsed_ms;  // cumulative wall clock
};

struct TrainResult {
  std::optional<FactorModel> model;
  std::vector<EpochRecord> history;
  StopReason stop_reason = StopReason::MaxEpochs;
  std::string divergence_detail;

  double best_valid_rmse() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : history) best = std::min(best, rec.valid_rmse);
    return best;
  }
  std::size_t best_valid_epoch() const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (const auto& rec : history)
      if (rec.valid_rmse < best) {
        best = rec.valid_rmse;
        at = rec.epoch;
      }
    return at;
  }
};

/// One pass over the training set: predict, refine, update — exactly one
/// controller tick and one factor update per instance.
inline void train_epoch(FactorModel& model, const HdiDataset& train_set, ControllerBank& bank,
                        const LfaHyper& hyper, const ShuffleSpec& shuffle, std::size_t epoch) {
  std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  if (shuffle.enabled) {
    Rng rng(derive_seed(shuffle.seed, epoch));
    fisher_yates(order, rng);
  }
  for (std::size_t idx : order) {
    const RatingInstance& inst = train_set.instances[idx];
    double prediction = model.predict(inst.row_id, inst.col_id);
    double refined = bank.refine(idx, inst.value, prediction);
    sgd_step(model, inst, refined, hyper, idx);
  }
}

/// Stop when the epoch budget is exhausted or the stop-metric RMSE moved by
/// less than tol between the last two epochs.
inline std::optional<StopReason> should_stop(const std::vector<EpochRecord>& history,
                                             const TrainConfig& config) {
  if (history.empty()) return std::nullopt;
  if (history.size() >= config.max_epochs) return StopReason::MaxEpochs;
  if (history.size() >= 2) {
    const auto& a = history[history.size() - 2];
    const auto& b = history.back();
    double prev = config.stop_metric == StopMetric::Validation ? a.valid_rmse : a.train_rmse;
    double curr = config.stop_metric == StopMetric::Validation ? b.valid_rmse : b.train_rmse;
    if (std::abs(curr - prev) < config.tol) return StopReason::Tolerance;
  }
  return std::nullopt;
}

using EpochCallback = std::function<void(const FactorModel&, const EpochRecord&)>;

/// Full training loop. Deterministic for fixed seeds and data; a divergence
/// anywhere yields a result with the history up to the failing epoch.
inline TrainResult fit(const HdiDataset& train_set, const HdiDataset& valid_set,
                       const TrainConfig& config, std::uint64_t init_seed,
                       const EpochCallback& on_epoch = {}) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");

  TrainResult result;
  FactorModel model = init_factors(train_set.num_rows, train_set.num_cols, config.latent_dim,
                                   init_seed, config.init_scale);
  ControllerBank bank = config.refiner.make_bank(train_set.size());

  auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1;; ++epoch) {
    try {
      train_epoch(model, train_set, bank, config.hyper, config.shuffle, epoch);
    } catch (const DivergenceError& e) {
      result.stop_reason = StopReason::Divergence;
      result.divergence_detail = std::string(e.what()) + " at epoch " + std::to_string(epoch);
      result.model = std::move(model);
      return result;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_rmse = rmse(model, train_set);
    rec.valid_rmse = valid_set.empty() ? rec.train_rmse : rmse(model, valid_set);
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(model, rec);
    if (auto reason = should_stop(result.history, config)) {
      result.stop_reason = *reason;
      break;
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace lfa

#endif  // LFA_TRAINER_HPP_
