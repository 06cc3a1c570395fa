#ifndef LFA_SYNTH_HPP_
#define LFA_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "lfa/common.hpp"
#include "lfa/data.hpp"

namespace lfa {

struct SynthSpec {
  std::int64_t rows = 20;
  std::int64_t cols = 15;
  std::int64_t rank = 2;
  double density = 0.7;   // fraction of cells observed
  double noise = 0.0;     // gaussian noise stddev added to each rating
  double factor_lo = 0.2; // ground-truth factor entries drawn from [lo, hi)
  double factor_hi = 1.0;

  void validate() const {
    if (rows < 1 || cols < 1 || rank < 1) throw ConfigError("synth dimensions must be positive");
    if (!(density > 0) || density > 1) throw ConfigError("synth density must be in (0, 1]");
    if (noise < 0) throw ConfigError("synth noise must be nonnegative");
  }
};

/// Low-rank ground-truth matrix with a Bernoulli observation mask; ratings
/// are factor inner products plus optional gaussian noise.
inline HdiDataset generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, 0x53594e54ULL));
  std::vector<double> u(static_cast<std::size_t>(spec.rows * spec.rank));
  std::vector<double> v(static_cast<std::size_t>(spec.cols * spec.rank));
  for (auto& w : u) w = rng.uniform(spec.factor_lo, spec.factor_hi);
  for (auto& w : v) w = rng.uniform(spec.factor_lo, spec.factor_hi);

  HdiDataset ds;
  ds.num_rows = spec.rows;
  ds.num_cols = spec.cols;
  for (std::int64_t m = 0; m < spec.rows; ++m) {
    for (std::int64_t n = 0; n < spec.cols; ++n) {
      if (rng.unit() >= spec.density) continue;
      double dot = 0;
      for (std::int64_t k = 0; k < spec.rank; ++k)
        dot += u[m * spec.rank + k] * v[n * spec.rank + k];
      if (spec.noise > 0) dot += spec.noise * rng.gaussian();
      ds.instances.push_back({m, n, dot});
    }
  }
  if (ds.instances.empty()) throw ConfigError("synthetic spec produced no instances");
  detail::finalize_bounds(ds);
  // finalize_bounds shrinks the shape to the max observed index; keep the
  // requested shape so densities stay exact.
  ds.num_rows = spec.rows;
  ds.num_cols = spec.cols;
  return ds;
}

}  // namespace lfa

#endif  // LFA_SYNTH_HPP_
