#ifndef LFA_DATA_HPP_
#define LFA_DATA_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lfa/common.hpp"

namespace lfa {

// One known entry of the sparse rating matrix.
struct RatingInstance {
  std::int64_t row_id;
  std::int64_t col_id;
  double value;

  friend bool operator==(const RatingInstance& a, const RatingInstance& b) {
    return a.row_id == b.row_id && a.col_id == b.col_id && a.value == b.value;
  }
};

// Sparse coordinate-form set of known entries, plus the matrix shape and the
// observed rating range.
struct HdiDataset {
  std::vector<RatingInstance> instances;
  std::int64_t num_rows = 0;
  std::int64_t num_cols = 0;
  double value_min = 0.0;
  double value_max = 0.0;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
};

struct DataSplit {
  HdiDataset train;
  HdiDataset validation;
  HdiDataset test;
};

enum class Delimiter { Auto, Tab, Comma, DoubleColon, Whitespace };

enum class IndexBase { Auto, Zero, One };

struct ParseFormat {
  Delimiter delimiter = Delimiter::Auto;
  IndexBase index_base = IndexBase::Auto;
};

struct ParseResult {
  HdiDataset dataset;
  std::size_t duplicate_count = 0;  // overwritten (row, col) pairs
};

namespace detail {

inline void split_line(std::string_view line, Delimiter d, std::vector<std::string_view>& out) {
  out.clear();
  if (d == Delimiter::Whitespace) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      if (i > start) out.push_back(line.substr(start, i - start));
    }
    return;
  }
  std::string_view sep = d == Delimiter::Tab ? "\t" : d == Delimiter::Comma ? "," : "::";
  std::size_t pos = 0;
  while (true) {
    std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

inline Delimiter detect_delimiter(std::string_view line) {
  if (line.find("::") != std::string_view::npos) return Delimiter::DoubleColon;
  if (line.find('\t') != std::string_view::npos) return Delimiter::Tab;
  if (line.find(',') != std::string_view::npos) return Delimiter::Comma;
  return Delimiter::Whitespace;
}

inline std::int64_t parse_index(std::string_view sv, std::size_t line) {
  std::int64_t v = 0;
  auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
    throw ParseError("bad index field '" + std::string(sv) + "'", line);
  if (v < 0) throw ParseError("negative index", line);
  return v;
}

// Shape and range are recomputed from whatever instance set remains.
inline void finalize_bounds(HdiDataset& ds) {
  ds.num_rows = 0;
  ds.num_cols = 0;
  ds.value_min = std::numeric_limits<double>::infinity();
  ds.value_max = -std::numeric_limits<double>::infinity();
  for (const auto& inst : ds.instances) {
    ds.num_rows = std::max(ds.num_rows, inst.row_id + 1);
    ds.num_cols = std::max(ds.num_cols, inst.col_id + 1);
    ds.value_min = std::min(ds.value_min, inst.value);
    ds.value_max = std::max(ds.value_max, inst.value);
  }
  if (ds.instances.empty()) {
    ds.value_min = 0.0;
    ds.value_max = 0.0;
  }
}

}  // namespace detail

/// Parses one rating per line. Duplicate (row, col) pairs keep the last
/// occurrence; the overwrite count is reported alongside the dataset.
inline ParseResult parse_ratings(std::istream& in, ParseFormat format = {}) {
  ParseResult result;
  auto& ds = result.dataset;
  Delimiter delim = format.delimiter;
  std::vector<std::string_view> fields;
  std::string line;
  std::size_t line_no = 0;
  bool saw_zero_index = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv(line);
    if (sv.empty()) continue;
    if (delim == Delimiter::Auto) delim = detail::detect_delimiter(sv);
    detail::split_line(sv, delim, fields);
    if (fields.size() < 3) throw ParseError("expected at least 3 fields", line_no);
    std::int64_t row = detail::parse_index(fields[0], line_no);
    std::int64_t col = detail::parse_index(fields[1], line_no);
    double value = parse_double(fields[2], line_no);
    if (!std::isfinite(value)) throw ParseError("non-finite rating value", line_no);
    if (row == 0 || col == 0) saw_zero_index = true;
    ds.instances.push_back({row, col, value});
  }
  if (ds.instances.empty()) throw ParseError("empty rating stream", line_no);

  bool shift = format.index_base == IndexBase::One ||
               (format.index_base == IndexBase::Auto && !saw_zero_index);
  if (shift) {
    for (auto& inst : ds.instances) {
      --inst.row_id;
      --inst.col_id;
    }
  }

  // Deduplicate keeping the last occurrence, preserving first-seen order.
  std::unordered_map<std::uint64_t, std::size_t> seen;
  seen.reserve(ds.instances.size());
  std::vector<RatingInstance> unique;
  unique.reserve(ds.instances.size());
  for (const auto& inst : ds.instances) {
    std::uint64_t key = (static_cast<std::uint64_t>(inst.row_id) << 32) |
                        static_cast<std::uint64_t>(inst.col_id);
    auto [it, inserted] = seen.emplace(key, unique.size());
    if (inserted) {
      unique.push_back(inst);
    } else {
      unique[it->second] = inst;
      ++result.duplicate_count;
    }
  }
  ds.instances = std::move(unique);
  detail::finalize_bounds(ds);
  return result;
}

/// Fraction of matrix cells that are known.
inline double density(const HdiDataset& ds) {
  if (ds.num_rows <= 0 || ds.num_cols <= 0)
    throw ConfigError("density requires a nonempty matrix shape");
  return static_cast<double>(ds.size()) /
         (static_cast<double>(ds.num_rows) * static_cast<double>(ds.num_cols));
}

/// Canonical tab-separated serialization with round-trip precision.
inline void serialize(const HdiDataset& ds, std::ostream& out) {
  for (const auto& inst : ds.instances) {
    out << inst.row_id << '\t' << inst.col_id << '\t' << format_double(inst.value) << '\n';
  }
}

namespace detail {

inline HdiDataset subset(const HdiDataset& source, const std::vector<std::size_t>& order,
                         std::size_t begin, std::size_t end) {
  HdiDataset out;
  out.num_rows = source.num_rows;
  out.num_cols = source.num_cols;
  out.instances.reserve(end - begin);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < end; ++i) {
    const auto& inst = source.instances[order[i]];
    out.instances.push_back(inst);
    lo = std::min(lo, inst.value);
    hi = std::max(hi, inst.value);
  }
  out.value_min = out.instances.empty() ? 0.0 : lo;
  out.value_max = out.instances.empty() ? 0.0 : hi;
  return out;
}

inline std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x9066bdd2c7a25ULL));
  fisher_yates(order, rng);
  return order;
}

}  // namespace detail

struct SplitFractions {
  double train;
  double test;
  double validation;
};

/// Shuffles by a seeded permutation, then partitions. Train and test take
/// floor counts; validation takes the remainder, so the parts are always an
/// exact partition of the source.
inline DataSplit split_dataset(const HdiDataset& ds, SplitFractions fr, std::uint64_t seed) {
  if (fr.train < 0 || fr.test < 0 || fr.validation < 0)
    throw ConfigError("split fractions must be nonnegative");
  if (std::abs(fr.train + fr.test + fr.validation - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
  std::size_t n = ds.size();
  auto n_train = static_cast<std::size_t>(fr.train * static_cast<double>(n));
  auto n_test = static_cast<std::size_t>(fr.test * static_cast<double>(n));
  if (n_train == 0) throw ConfigError("split produces an empty training set");

  auto order = detail::permutation(n, seed);
  DataSplit split;
  split.train = detail::subset(ds, order, 0, n_train);
  split.test = detail::subset(ds, order, n_train, n_train + n_test);
  split.validation = detail::subset(ds, order, n_train + n_test, n);
  return split;
}

/// k folds over a seeded permutation; split i uses fold i as test,
/// fold (i+1) mod k as validation, and the remaining k-2 folds as train.
inline std::vector<DataSplit> kfold(const HdiDataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 3) throw ConfigError("kfold requires k >= 3 so the training set is nonempty");
  if (ds.size() < k) throw ConfigError("kfold requires at least k instances");

  auto order = detail::permutation(ds.size(), seed);
  std::size_t n = ds.size();
  std::vector<std::size_t> bounds(k + 1);
  for (std::size_t i = 0; i <= k; ++i) bounds[i] = i * n / k;

  std::vector<DataSplit> splits;
  splits.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t vi = (i + 1) % k;
    DataSplit s;
    s.test = detail::subset(ds, order, bounds[i], bounds[i + 1]);
    s.validation = detail::subset(ds, order, bounds[vi], bounds[vi + 1]);
    HdiDataset train;
    train.num_rows = ds.num_rows;
    train.num_cols = ds.num_cols;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t fold = 0; fold < k; ++fold) {
      if (fold == i || fold == vi) continue;
      for (std::size_t j = bounds[fold]; j < bounds[fold + 1]; ++j) {
        const auto& inst = ds.instances[order[j]];
        train.instances.push_back(inst);
        lo = std::min(lo, inst.value);
        hi = std::max(hi, inst.value);
      }
    }
    train.value_min = train.instances.empty() ? 0.0 : lo;
    train.value_max = train.instances.empty() ? 0.0 : hi;
    s.train = std::move(train);
    splits.push_back(std::move(s));
  }
  return splits;
}

}  // namespace lfa

#endif  // LFA_DATA_HPP_
