#ifndef LFA_BENCH_HPP_
#define LFA_BENCH_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "lfa/data.hpp"
#include "lfa/eval.hpp"
#include "lfa/trainer.hpp"

namespace lfa {

struct BenchModelSpec {
  std::string name;
  TrainConfig config;
};

/// Trains every model spec on the same split with the same seeds and
/// collects per-model accuracy and cost. A diverging model is flagged in
/// its row; the remaining models still run. When target_valid_rmse is
/// finite, each row records the first epoch reaching it.
inline BenchReport run_benchmark(const DataSplit& split, const std::vector<BenchModelSpec>& specs,
                                 std::uint64_t init_seed,
                                 double target_valid_rmse = std::numeric_limits<double>::quiet_NaN()) {
  if (specs.empty()) throw ConfigError("benchmark needs at least one model spec");
  BenchReport report;
  report.target_valid_rmse = target_valid_rmse;
  for (const auto& spec : specs) {
    BenchRow row;
    row.name = spec.name;
    TrainResult res = fit(split.train, split.validation, spec.config, init_seed,
                          [&](const FactorModel& model, const EpochRecord& rec) {
                            if (!split.test.empty()) {
                              double t = rmse(model, split.test);
                              row.lowest_test_rmse = std::min(row.lowest_test_rmse, t);
                              row.final_test_rmse = t;
                            }
                            if (row.epochs_to_target == 0 && std::isfinite(target_valid_rmse) &&
                                rec.valid_rmse <= target_valid_rmse)
                              row.epochs_to_target = rec.epoch;
                          });
    row.diverged = res.stop_reason == StopReason::Divergence;
    row.divergence_detail = res.divergence_detail;
    row.lowest_valid_rmse = res.best_valid_rmse();
    row.best_valid_epoch = res.best_valid_epoch();
    row.epochs_run = res.history.size();
    row.total_seconds = res.history.empty() ? 0.0 : res.history.back().elapsed_ms / 1000.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace lfa

#endif  // LFA_BENCH_HPP_
