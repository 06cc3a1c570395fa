#ifndef LFA_EVAL_HPP_
#define LFA_EVAL_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lfa/common.hpp"
#include "lfa/data.hpp"
#include "lfa/model.hpp"

namespace lfa {

/// Root mean squared prediction error over a held-out set.
inline double rmse(const FactorModel& model, const HdiDataset& ds) {
  if (ds.empty()) throw EvalError("rmse on empty dataset");
  CompensatedSum sum;
  for (const auto& inst : ds.instances) {
    double e = inst.value - model.predict(inst.row_id, inst.col_id);
    sum.add(e * e);
  }
  return std::sqrt(sum.value() / static_cast<double>(ds.size()));
}

/// Relative cost reduction (cost_high - cost_low) / cost_high.
inline double time_saving(double cost_high, double cost_low) {
  if (!(cost_high > 0)) throw EvalError("time_saving requires positive reference cost");
  return (cost_high - cost_low) / cost_high;
}

struct BenchRow {
  std::string name;
  bool diverged = false;
  std::string divergence_detail;
  double lowest_test_rmse = std::numeric_limits<double>::infinity();
  double final_test_rmse = std::numeric_limits<double>::infinity();
  double lowest_valid_rmse = std::numeric_limits<double>::infinity();
  std::size_t best_valid_epoch = 0;
  std::size_t epochs_run = 0;
  double total_seconds = 0;
  // First epoch whose validation RMSE reaches the shared target; 0 when the
  // target was never reached or no target was given.
  std::size_t epochs_to_target = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double target_valid_rmse = std::numeric_limits<double>::quiet_NaN();

  const BenchRow* find(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }
};

}  // namespace lfa

#endif  // LFA_EVAL_HPP_
