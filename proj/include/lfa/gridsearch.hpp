#ifndef LFA_GRIDSEARCH_HPP_
#define LFA_GRIDSEARCH_HPP_

#include <algorithm>
#include <atomic>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "lfa/common.hpp"
#include "lfa/trainer.hpp"

namespace lfa {

// Ordered so that output rankings are stable across runs.
using GridAxes = std::map<std::string, std::vector<double>>;

struct GridPoint {
  std::map<std::string, double> values;
  double lowest_valid_rmse = std::numeric_limits<double>::infinity();
  std::size_t best_valid_epoch = 0;
  std::size_t epochs_run = 0;
  bool diverged = false;
};

inline void apply_grid_key(TrainConfig& config, const std::string& key, double value) {
  if (key == "eta")
    config.hyper.eta = value;
  else if (key == "lambda")
    config.hyper.lambda = value;
  else if (key == "omega")
    config.refiner.adrc.set_bandwidth(value);
  else if (key == "h")
    config.refiner.adrc.h = value;
  else if (key == "b2")
    config.refiner.adrc.b2 = value;
  else if (key == "kp")
    config.refiner.pid.kp = value;
  else if (key == "ki")
    config.refiner.pid.ki = value;
  else if (key == "kd")
    config.refiner.pid.kd = value;
  else
    throw ConfigError("unknown grid key '" + key + "'");
}

inline std::vector<std::map<std::string, double>> expand_grid(const GridAxes& axes) {
  if (axes.empty()) throw ConfigError("empty grid");
  std::vector<std::map<std::string, double>> points{{}};
  for (const auto& [key, values] : axes) {
    if (values.empty()) throw ConfigError("grid axis '" + key + "' has no values");
    std::vector<std::map<std::string, double>> next;
    next.reserve(points.size() * values.size());
    for (const auto& base : points)
      for (double v : values) {
        auto p = base;
        p[key] = v;
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }
  return points;
}

/// Trains every grid point on the train/validation pair and returns points
/// sorted by lowest validation RMSE (diverged points sink to the bottom).
/// Points are independent, so they may be evaluated on several threads.
inline std::vector<GridPoint> grid_search(const HdiDataset& train_set,
                                          const HdiDataset& valid_set,
                                          const TrainConfig& base_config, const GridAxes& axes,
                                          std::uint64_t init_seed, unsigned workers = 1) {
  auto combos = expand_grid(axes);
  std::vector<GridPoint> points(combos.size());

  auto run_point = [&](std::size_t i) {
    GridPoint& pt = points[i];
    pt.values = combos[i];
    TrainConfig config = base_config;
    for (const auto& [key, value] : pt.values) apply_grid_key(config, key, value);
    try {
      TrainResult res = fit(train_set, valid_set, config, init_seed);
      pt.diverged = res.stop_reason == StopReason::Divergence;
      pt.lowest_valid_rmse = res.best_valid_rmse();
      pt.best_valid_epoch = res.best_valid_epoch();
      pt.epochs_run = res.history.size();
    } catch (const ConfigError&) {
      pt.diverged = true;
    }
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < points.size(); i = cursor.fetch_add(1))
          run_point(i);
      });
    for (auto& t : pool) t.join();
  }

  std::stable_sort(points.begin(), points.end(), [](const GridPoint& a, const GridPoint& b) {
    if (a.diverged != b.diverged) return !a.diverged;
    return a.lowest_valid_rmse < b.lowest_valid_rmse;
  });
  return points;
}

}  // namespace lfa

#endif  // LFA_GRIDSEARCH_HPP_
