#ifndef LFA_MODEL_HPP_
#define LFA_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lfa/common.hpp"
#include "lfa/data.hpp"

namespace lfa {

struct LfaHyper {
  double eta = 0.01;     // learning rate
  double lambda = 0.05;  // regularization coefficient

  void validate() const {
    if (!(eta > 0)) throw ConfigError("eta must be positive");
    if (!(lambda >= 0)) throw ConfigError("lambda must be nonnegative");
  }
};

/**
 * Dense latent factor pair approximating the sparse rating matrix as the
 * product of a row-factor matrix and a column-factor matrix transpose.
 * Both matrices are stored row-major.
 */
class FactorModel {
 public:
  FactorModel(std::int64_t num_rows, std::int64_t num_cols, std::int64_t f)
      : num_rows_(num_rows),
        num_cols_(num_cols),
        f_(f),
        x_(static_cast<std::size_t>(num_rows * f), 0.0),
        y_(static_cast<std::size_t>(num_cols * f), 0.0) {
    if (num_rows < 1 || num_cols < 1 || f < 1)
      throw ConfigError("factor model dimensions must be positive");
  }

  std::int64_t num_rows() const { return num_rows_; }
  std::int64_t num_cols() const { return num_cols_; }
  std::int64_t latent_dim() const { return f_; }

  std::span<double> row_factors(std::int64_t m) {
    check_row(m);
    return {x_.data() + m * f_, static_cast<std::size_t>(f_)};
  }
  std::span<double> col_factors(std::int64_t n) {
    check_col(n);
    return {y_.data() + n * f_, static_cast<std::size_t>(f_)};
  }
  std::span<const double> row_factors(std::int64_t m) const {
    check_row(m);
    return {x_.data() + m * f_, static_cast<std::size_t>(f_)};
  }
  std::span<const double> col_factors(std::int64_t n) const {
    check_col(n);
    return {y_.data() + n * f_, static_cast<std::size_t>(f_)};
  }

  double predict(std::int64_t m, std::int64_t n) const {
    check_row(m);
    check_col(n);
    const double* xm = x_.data() + m * f_;
    const double* yn = y_.data() + n * f_;
    double dot = 0.0;
    for (std::int64_t k = 0; k < f_; ++k) dot += xm[k] * yn[k];
    return dot;
  }

  const std::vector<double>& x_data() const { return x_; }
  const std::vector<double>& y_data() const { return y_; }

 private:
  void check_row(std::int64_t m) const {
    if (m < 0 || m >= num_rows_) throw std::out_of_range("row index " + std::to_string(m));
  }
  void check_col(std::int64_t n) const {
    if (n < 0 || n >= num_cols_) throw std::out_of_range("col index " + std::to_string(n));
  }

  std::int64_t num_rows_;
  std::int64_t num_cols_;
  std::int64_t f_;
  std::vector<double> x_;
  std::vector<double> y_;
};

/// Entries drawn uniformly from the open interval (0, init_scale).
inline FactorModel init_factors(std::int64_t num_rows, std::int64_t num_cols, std::int64_t f,
                                std::uint64_t seed, double init_scale = 0.1) {
  if (!(init_scale > 0)) throw ConfigError("init_scale must be positive");
  FactorModel model(num_rows, num_cols, f);
  Rng rng(derive_seed(seed, 0x1f4c7ULL));
  for (std::int64_t m = 0; m < num_rows; ++m)
    for (auto& v : model.row_factors(m)) v = rng.open01() * init_scale;
  for (std::int64_t n = 0; n < num_cols; ++n)
    for (auto& v : model.col_factors(n)) v = rng.open01() * init_scale;
  return model;
}

inline double instant_error(const FactorModel& model, const RatingInstance& inst) {
  return inst.value - model.predict(inst.row_id, inst.col_id);
}

/// Squared instant error plus the per-instance regularization terms.
inline double instant_loss(const FactorModel& model, const RatingInstance& inst,
                           const LfaHyper& hyper) {
  double e = instant_error(model, inst);
  double xs = 0.0, ys = 0.0;
  for (double v : model.row_factors(inst.row_id)) xs += v * v;
  for (double v : model.col_factors(inst.col_id)) ys += v * v;
  return e * e + hyper.lambda * xs + hyper.lambda * ys;
}

/// Regularized objective summed over all known entries; the norm penalties
/// are counted once per instance, so rows appearing in several instances are
/// penalized repeatedly.
inline double full_loss(const FactorModel& model, const HdiDataset& ds, const LfaHyper& hyper) {
  if (ds.empty()) throw EvalError("full_loss on empty dataset");
  CompensatedSum sum;
  for (const auto& inst : ds.instances) sum.add(instant_loss(model, inst, hyper));
  return sum.value();
}

/// One stochastic gradient step with the (possibly refined) error. Both
/// factor rows are updated from their pre-step values.
inline void sgd_step(FactorModel& model, const RatingInstance& inst, double refined_error,
                     const LfaHyper& hyper, std::size_t instance_index = 0) {
  auto xm = model.row_factors(inst.row_id);
  auto yn = model.col_factors(inst.col_id);
  const std::size_t f = xm.size();
  bool finite = true;
  for (std::size_t k = 0; k < f; ++k) {
    double xk = xm[k];
    double yk = yn[k];
    xm[k] = xk + hyper.eta * (refined_error * yk - hyper.lambda * xk);
    yn[k] = yk + hyper.eta * (refined_error * xk - hyper.lambda * yk);
    finite = finite && std::isfinite(xm[k]) && std::isfinite(yn[k]);
  }
  if (!finite) throw DivergenceError("non-finite factor after update", instance_index);
}

/// Text checkpoint: header line then one row of factors per line, using
/// round-trip decimal formatting so load(save(m)) == m exactly.
inline void save_model(const FactorModel& model, std::ostream& out) {
  out << "lfa-checkpoint 1 " << model.num_rows() << ' ' << model.num_cols() << ' '
      << model.latent_dim() << '\n';
  for (std::int64_t m = 0; m < model.num_rows(); ++m) {
    auto row = model.row_factors(m);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "\t" : "") << format_double(row[k]);
    out << '\n';
  }
  for (std::int64_t n = 0; n < model.num_cols(); ++n) {
    auto row = model.col_factors(n);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "\t" : "") << format_double(row[k]);
    out << '\n';
  }
}

inline FactorModel load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  std::int64_t rows = 0, cols = 0, f = 0;
  in >> magic >> version >> rows >> cols >> f;
  if (!in || magic != "lfa-checkpoint" || version != 1)
    throw ParseError("bad checkpoint header", 1);
  FactorModel model(rows, cols, f);
  for (std::int64_t m = 0; m < rows; ++m)
    for (auto& v : model.row_factors(m)) in >> v;
  for (std::int64_t n = 0; n < cols; ++n)
    for (auto& v : model.col_factors(n)) in >> v;
  if (!in) throw ParseError("truncated checkpoint", 2);
  return model;
}

}  // namespace lfa

#endif  // LFA_MODEL_HPP_
