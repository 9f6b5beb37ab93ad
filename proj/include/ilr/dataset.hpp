#ifndef ILR_DATASET_HPP
#define ILR_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ilr/error.hpp"
#include "ilr/interval.hpp"
#include "ilr/rng.hpp"

namespace ilr {

struct DataPoint {
  std::vector<Interval> features;
  UncertainLabel label;

  bool precise() const {
    return std::all_of(features.begin(), features.end(),
                       [](const Interval& iv) { return iv.degenerate(); });
  }
  friend bool operator==(const DataPoint&, const DataPoint&) = default;
};

/// Rows of interval features with possibly unknown binary labels. All rows
/// share one dimension. Transforms below return new datasets.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<std::string> feature_names, std::vector<DataPoint> points)
      : names_(std::move(feature_names)), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (points_[i].features.size() != names_.size()) {
        throw DataError("row " + std::to_string(i) + " has " +
                        std::to_string(points_[i].features.size()) +
                        " features, expected " + std::to_string(names_.size()));
      }
    }
  }

  static std::vector<std::string> default_names(std::size_t m) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back("x" + std::to_string(j + 1));
    return names;
  }

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  const std::vector<DataPoint>& points() const noexcept { return points_; }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }

  std::size_t unknown_label_count() const {
    return static_cast<std::size_t>(
        std::count_if(points_.begin(), points_.end(),
                      [](const DataPoint& p) { return p.label.is_unknown(); }));
  }

  std::size_t uncertain_cell_count() const {
    std::size_t k = 0;
    for (const auto& p : points_)
      for (const auto& iv : p.features) k += iv.degenerate() ? 0 : 1;
    return k;
  }

  bool features_precise() const { return uncertain_cell_count() == 0; }
  bool labels_known() const { return unknown_label_count() == 0; }
  bool precise() const { return features_precise() && labels_known(); }

  /// Rows holding any interval cell or unknown label.
  std::vector<std::size_t> uncertain_rows() const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!points_[i].precise() || points_[i].label.is_unknown()) rows.push_back(i);
    }
    return rows;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<DataPoint> points_;
};

inline std::string describe_rows(const std::vector<std::size_t>& rows,
                                 std::size_t limit = 10) {
  std::string s;
  for (std::size_t k = 0; k < rows.size() && k < limit; ++k) {
    if (k) s += ", ";
    s += std::to_string(rows[k]);
  }
  if (rows.size() > limit) s += ", ... (" + std::to_string(rows.size()) + " total)";
  return s;
}

/// Numerically stable logistic function, result kept strictly inside (0, 1).
inline double sigmoid(double score) {
  double p;
  if (score >= 0) {
    p = 1.0 / (1.0 + std::exp(-score));
  } else {
    const double e = std::exp(score);
    p = e / (1.0 + e);
  }
  constexpr double kTiny = 0x1.0p-1022;
  constexpr double kBelowOne = 1.0 - 0x1.0p-53;
  return std::clamp(p, kTiny, kBelowOne);
}

/// Precise covariates drawn uniformly from x_range in every column, labels
/// drawn from the logistic model `truth`.
inline Dataset synthesize(std::size_t n, std::uint64_t seed,
                          const Coefficients& truth, const Interval& x_range) {
  if (n == 0) throw std::invalid_argument("synthesize: n must be at least 1");
  const std::size_t m = truth.dimension();
  Rng rng(seed);
  std::vector<DataPoint> points;
  points.reserve(n);
  std::vector<double> x(m);
  for (std::size_t i = 0; i < n; ++i) {
    DataPoint p;
    for (std::size_t j = 0; j < m; ++j) {
      x[j] = rng.uniform(x_range.lo(), x_range.hi());
      p.features.emplace_back(x[j]);
    }
    p.label = UncertainLabel::known(rng.bernoulli(sigmoid(linear_score(truth, x))) ? 1 : 0);
    points.push_back(std::move(p));
  }
  return Dataset(Dataset::default_names(m), std::move(points));
}

enum class CensorMode { symmetric, left_biased, right_biased, split_biased };

inline std::optional<CensorMode> parse_censor_mode(const std::string& s) {
  if (s == "symmetric") return CensorMode::symmetric;
  if (s == "left" || s == "left_biased") return CensorMode::left_biased;
  if (s == "right" || s == "right_biased") return CensorMode::right_biased;
  if (s == "split" || s == "split_biased") return CensorMode::split_biased;
  return std::nullopt;
}

/// Replace every precise feature value x by an interval containing it.
///   symmetric:    [c - eps, c + eps] with c ~ U(x - eps, x + eps)
///   left_biased:  [x, x + 2 eps]   (x is the lower endpoint)
///   right_biased: [x - 2 eps, x]   (x is the upper endpoint)
///   split_biased: right_biased below split_point, left_biased at or above
inline Dataset intervalize(const Dataset& d, CensorMode mode, double epsilon,
                           std::uint64_t seed,
                           std::optional<double> split_point = std::nullopt) {
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("intervalize: epsilon must be finite and >= 0");
  }
  if (mode == CensorMode::split_biased && !split_point) {
    throw std::invalid_argument("intervalize: split_biased needs a split point");
  }
  if (!d.features_precise()) {
    throw DataError("intervalize: dataset already has interval features");
  }
  Rng rng(seed);
  std::vector<DataPoint> out;
  out.reserve(d.size());
  for (const auto& p : d.points()) {
    DataPoint q;
    q.label = p.label;
    for (const auto& iv : p.features) {
      const double x = iv.lo();
      switch (mode) {
        case CensorMode::symmetric: {
          const double c = rng.uniform(x - epsilon, x + epsilon);
          // Rounding may push an endpoint past x by an ulp; x must stay inside.
          q.features.emplace_back(std::min(c - epsilon, x), std::max(c + epsilon, x));
          break;
        }
        case CensorMode::left_biased:
          q.features.emplace_back(x, x + 2 * epsilon);
          break;
        case CensorMode::right_biased:
          q.features.emplace_back(x - 2 * epsilon, x);
          break;
        case CensorMode::split_biased:
          if (x < *split_point) {
            q.features.emplace_back(x - 2 * epsilon, x);
          } else {
            q.features.emplace_back(x, x + 2 * epsilon);
          }
          break;
      }
    }
    out.push_back(std::move(q));
  }
  return Dataset(d.feature_names(), std::move(out));
}

inline Dataset censor_labels(const Dataset& d, const std::set<std::size_t>& indices) {
  std::vector<DataPoint> out = d.points();
  for (std::size_t i : indices) {
    if (i >= out.size()) {
      throw std::out_of_range("censor_labels: row " + std::to_string(i) +
                              " out of range for " + std::to_string(out.size()) +
                              " rows");
    }
    out[i].label = UncertainLabel::unknown();
  }
  return Dataset(d.feature_names(), std::move(out));
}

/// Indices of the k rows whose (interval midpoint) features lie closest to
/// the decision boundary of `model`, ties broken by row order.
inline std::set<std::size_t> rows_nearest_boundary(const Dataset& d,
                                                   const Coefficients& model,
                                                   std::size_t k) {
  check_dimension(model, d.dimension());
  std::vector<std::pair<double, std::size_t>> dist;
  std::vector<double> x(d.dimension());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = d[i].features[j].midpoint();
    dist.emplace_back(std::abs(linear_score(model, x)), i);
  }
  std::sort(dist.begin(), dist.end());
  std::set<std::size_t> rows;
  for (std::size_t i = 0; i < k && i < dist.size(); ++i) rows.insert(dist[i].second);
  return rows;
}

enum class CollapseStrategy { midpoint, drop_uncertain };

/// Reduce to a precise dataset, either by replacing intervals by their
/// midpoints (rows with unknown labels dropped) or by dropping every row with
/// any uncertainty.
inline Dataset collapse(const Dataset& d, CollapseStrategy strategy) {
  std::vector<DataPoint> out;
  for (const auto& p : d.points()) {
    if (p.label.is_unknown()) continue;
    if (strategy == CollapseStrategy::drop_uncertain) {
      if (p.precise()) out.push_back(p);
      continue;
    }
    DataPoint q;
    q.label = p.label;
    for (const auto& iv : p.features) q.features.emplace_back(iv.midpoint());
    out.push_back(std::move(q));
  }
  if (out.empty()) throw DataError("collapse: no rows left after collapsing");
  return Dataset(d.feature_names(), std::move(out));
}

}  // namespace ilr

#endif
