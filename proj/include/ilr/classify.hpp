#ifndef ILR_CLASSIFY_HPP
#define ILR_CLASSIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ilr/dataset.hpp"
#include "ilr/envelope.hpp"
#include "ilr/error.hpp"
#include "ilr/interval.hpp"

namespace ilr {

enum class Decision { positive, negative, dunno };

/// abstain: three-way rule, dunno when the threshold lies inside a
///   non-degenerate probability interval; a degenerate interval keeps the
///   precise "p >= C is positive" convention.
/// upper_bound: positive iff the upper probability reaches C.
/// lower_bound: positive iff the lower probability reaches C.
enum class Rule { abstain, upper_bound, lower_bound };

inline std::optional<Rule> parse_rule(const std::string& s) {
  if (s == "abstain") return Rule::abstain;
  if (s == "upper" || s == "upper_bound") return Rule::upper_bound;
  if (s == "lower" || s == "lower_bound") return Rule::lower_bound;
  return std::nullopt;
}

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::abstain: return "abstain";
    case Rule::upper_bound: return "upper_bound";
    case Rule::lower_bound: return "lower_bound";
  }
  return "?";
}

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::positive: return "positive";
    case Decision::negative: return "negative";
    case Decision::dunno: return "dunno";
  }
  return "?";
}

inline void check_threshold(double c) {
  if (!(c > 0 && c < 1)) throw std::invalid_argument("threshold must lie in (0, 1)");
}

inline Decision classify(const Interval& p, double c, Rule rule = Rule::abstain) {
  check_threshold(c);
  if (p.lo() < 0 || p.hi() > 1) throw std::invalid_argument("probability interval outside [0, 1]");
  switch (rule) {
    case Rule::upper_bound:
      return p.hi() >= c ? Decision::positive : Decision::negative;
    case Rule::lower_bound:
      return p.lo() >= c ? Decision::positive : Decision::negative;
    case Rule::abstain:
      break;
  }
  if (p.degenerate()) return p.lo() >= c ? Decision::positive : Decision::negative;
  if (p.lo() > c) return Decision::positive;
  if (p.hi() < c) return Decision::negative;
  return Decision::dunno;
}

/// Confusion matrix with a separate row for abstentions:
///          truth 1  truth 0
/// pred 1      a        b
/// pred 0      c        d
/// none        e        f
struct TernaryConfusion {
  std::size_t a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;

  std::size_t positives() const { return a + c + e; }
  std::size_t negatives() const { return b + d + f; }
  std::size_t total() const { return positives() + negatives(); }
  friend bool operator==(const TernaryConfusion&, const TernaryConfusion&) = default;
};

namespace detail {

inline int known_truth(const UncertainLabel& l, std::size_t i) {
  if (l.is_unknown()) {
    throw DataError("evaluation needs known truth labels; row " + std::to_string(i) +
                    " is unknown");
  }
  return l.value();
}

inline std::vector<int> truth_of(const Dataset& d) {
  std::vector<int> t(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) t[i] = known_truth(d[i].label, i);
  return t;
}

}  // namespace detail

inline TernaryConfusion ternary_confusion(std::span<const Decision> decisions,
                                          std::span<const UncertainLabel> truth) {
  if (decisions.size() != truth.size()) {
    throw DataError("ternary_confusion: " + std::to_string(decisions.size()) +
                    " decisions but " + std::to_string(truth.size()) + " labels");
  }
  TernaryConfusion t;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pos = detail::known_truth(truth[i], i) == 1;
    switch (decisions[i]) {
      case Decision::positive: ++(pos ? t.a : t.b); break;
      case Decision::negative: ++(pos ? t.c : t.d); break;
      case Decision::dunno: ++(pos ? t.e : t.f); break;
    }
  }
  return t;
}

/// Ratios with an empty denominator stay disengaged rather than 0 or 1.
struct UncertaintyStats {
  std::optional<double> sensitivity;            // a / T+, only if e = f = 0
  std::optional<double> specificity;            // d / T-, only if e = f = 0
  std::optional<double> predictive_sensitivity; // a / (a + c)
  std::optional<double> predictive_specificity; // d / (b + d)
  std::optional<double> positive_incertitude;   // e / (a + c + e)
  std::optional<double> negative_incertitude;   // f / (b + d + f)
};

namespace detail {
inline std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

inline UncertaintyStats uncertainty_stats(const TernaryConfusion& t) {
  UncertaintyStats s;
  s.predictive_sensitivity = detail::ratio(t.a, t.a + t.c);
  s.predictive_specificity = detail::ratio(t.d, t.b + t.d);
  s.positive_incertitude = detail::ratio(t.e, t.a + t.c + t.e);
  s.negative_incertitude = detail::ratio(t.f, t.b + t.d + t.f);
  if (t.e == 0 && t.f == 0) {
    s.sensitivity = s.predictive_sensitivity;
    s.specificity = s.predictive_specificity;
  }
  return s;
}

struct CountRange {
  std::size_t lo = 0, hi = 0;
  friend bool operator==(const CountRange&, const CountRange&) = default;
};

/// Confusion matrix whose cells are count ranges: an abstention of truth
/// class k adds [0, 1] to both cells of column k.
struct IntervalConfusion {
  CountRange a, b, c, d;
  std::size_t positives = 0, negatives = 0;

  std::size_t total() const { return positives + negatives; }
  std::optional<Interval> sensitivity() const {
    if (positives == 0) return std::nullopt;
    const double n = static_cast<double>(positives);
    return Interval(static_cast<double>(a.lo) / n, static_cast<double>(a.hi) / n);
  }
  std::optional<Interval> specificity() const {
    if (negatives == 0) return std::nullopt;
    const double n = static_cast<double>(negatives);
    return Interval(static_cast<double>(d.lo) / n, static_cast<double>(d.hi) / n);
  }
};

inline IntervalConfusion interval_confusion(const TernaryConfusion& t) {
  IntervalConfusion ic;
  ic.a = {t.a, t.a + t.e};
  ic.c = {t.c, t.c + t.e};
  ic.b = {t.b, t.b + t.f};
  ic.d = {t.d, t.d + t.f};
  ic.positives = t.positives();
  ic.negatives = t.negatives();
  return ic;
}

inline std::vector<Interval> predict_intervals(const ModelSet& ms, const Dataset& test) {
  if (test.dimension() != ms.dimension()) {
    throw DataError("dimension mismatch: model set has " + std::to_string(ms.dimension()) +
                    " features, data has " + std::to_string(test.dimension()));
  }
  std::vector<Interval> out;
  out.reserve(test.size());
  for (const auto& p : test.points()) out.push_back(predict_interval(ms, p.features));
  return out;
}

inline std::vector<Decision> classify_all(std::span<const Interval> probs, double c, Rule rule) {
  std::vector<Decision> out;
  out.reserve(probs.size());
  for (const auto& p : probs) out.push_back(classify(p, c, rule));
  return out;
}

inline std::vector<UncertainLabel> labels_of(const Dataset& d) {
  std::vector<UncertainLabel> out;
  for (const auto& p : d.points()) out.push_back(p.label);
  return out;
}

inline TernaryConfusion ternary_confusion(const ModelSet& ms, const Dataset& test, double c,
                                          Rule rule = Rule::abstain) {
  const auto probs = predict_intervals(ms, test);
  const auto labels = labels_of(test);
  return ternary_confusion(classify_all(probs, c, rule), labels);
}

inline IntervalConfusion interval_confusion(const ModelSet& ms, const Dataset& test, double c) {
  return interval_confusion(ternary_confusion(ms, test, c, Rule::abstain));
}

// ---------------------------------------------------------------------------
// ROC

struct RocPoint {
  double threshold;
  double fpr;
  double sensitivity;
};

/// Points ordered by increasing threshold, so fpr and sensitivity are
/// non-increasing along the sequence.
struct RocCurve {
  std::vector<RocPoint> points;
};

/// A score at or above the threshold counts as positive. Thresholds are the
/// distinct scores plus 0 and 1, and sentinels beyond the score range when
/// needed so the curve always reaches (0, 0) and (1, 1).
inline RocCurve roc(std::span<const double> scores, std::span<const int> truth) {
  if (scores.size() != truth.size()) throw DataError("roc: scores and labels differ in length");
  std::size_t pos = 0, neg = 0;
  for (int y : truth) (y == 1 ? pos : neg)++;
  if (pos == 0 || neg == 0) throw DataError("roc: need both positive and negative truth labels");

  std::vector<std::pair<double, int>> sorted;
  for (std::size_t i = 0; i < scores.size(); ++i) sorted.emplace_back(scores[i], truth[i]);
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> thresholds;
  for (const auto& [s, y] : sorted) thresholds.push_back(s);
  thresholds.push_back(0.0);
  thresholds.push_back(1.0);
  const double smin = sorted.front().first, smax = sorted.back().first;
  if (smax >= 1.0) thresholds.push_back(std::nextafter(smax, INFINITY));
  if (smin < 0.0) thresholds.push_back(smin);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // Sweep thresholds upward; everything below the threshold is negative.
  RocCurve curve;
  std::size_t idx = 0, tp_below = 0, fp_below = 0;
  for (double c : thresholds) {
    while (idx < sorted.size() && sorted[idx].first < c) {
      (sorted[idx].second == 1 ? tp_below : fp_below)++;
      ++idx;
    }
    curve.points.push_back({c, static_cast<double>(neg - fp_below) / static_cast<double>(neg),
                            static_cast<double>(pos - tp_below) / static_cast<double>(pos)});
  }
  return curve;
}

inline RocCurve roc(std::span<const double> scores, std::span<const UncertainLabel> truth) {
  std::vector<int> t(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) t[i] = detail::known_truth(truth[i], i);
  return roc(scores, t);
}

/// Trapezoidal area under the curve.
inline double auc(const RocCurve& r) {
  double area = 0;
  for (std::size_t k = 1; k < r.points.size(); ++k) {
    const auto& hi = r.points[k - 1];  // lower threshold: larger rates
    const auto& lo = r.points[k];
    area += (hi.fpr - lo.fpr) * (hi.sensitivity + lo.sensitivity) / 2;
  }
  return area;
}

/// Sensitivity at a given fpr, linear between curve vertices. On a vertical
/// segment the upper end is used.
inline double sensitivity_at(const RocCurve& r, double fpr) {
  const auto& pts = r.points;  // fpr non-increasing along pts
  double best = 0;
  for (std::size_t k = pts.size(); k-- > 0;) {
    const auto& p = pts[k];
    if (p.fpr == fpr) best = std::max(best, p.sensitivity);
    if (k > 0) {
      const auto& q = pts[k - 1];
      if (p.fpr < fpr && fpr < q.fpr) {
        const double t = (fpr - p.fpr) / (q.fpr - p.fpr);
        best = std::max(best, p.sensitivity + t * (q.sensitivity - p.sensitivity));
      }
    }
  }
  return best;
}

struct RocBand {
  std::vector<double> fpr;     // grid
  std::vector<double> s_lo, s_hi;
  std::vector<double> member_auc;
  Interval auc{0.0};
};

inline std::vector<double> member_scores(const Coefficients& c, const Dataset& test) {
  std::vector<double> s;
  s.reserve(test.size());
  std::vector<double> x(test.dimension());
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!test[i].precise()) {
      throw DataError("ROC evaluation needs precise test features; row " + std::to_string(i) +
                      " has intervals");
    }
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = test[i].features[j].lo();
    s.push_back(predict_proba(c, x));
  }
  return s;
}

/// Pointwise sensitivity envelope over members on a 512-point fpr grid, and
/// the [min, max] of member AUCs.
inline RocBand roc_band(const ModelSet& ms, const Dataset& test, std::size_t grid = 512) {
  if (test.dimension() != ms.dimension()) throw DataError("roc_band: dimension mismatch");
  const auto truth = detail::truth_of(test);
  RocBand band;
  band.fpr.resize(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    band.fpr[k] = grid == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(grid - 1);
  }
  band.s_lo.assign(grid, INFINITY);
  band.s_hi.assign(grid, -INFINITY);
  for (const auto& c : ms.models()) {
    const RocCurve r = roc(member_scores(c.coefficients, test), truth);
    band.member_auc.push_back(auc(r));
    for (std::size_t k = 0; k < grid; ++k) {
      const double s = sensitivity_at(r, band.fpr[k]);
      band.s_lo[k] = std::min(band.s_lo[k], s);
      band.s_hi[k] = std::max(band.s_hi[k], s);
    }
  }
  const auto [lo, hi] = std::minmax_element(band.member_auc.begin(), band.member_auc.end());
  band.auc = Interval(*lo, *hi);
  return band;
}

struct Roc3DPoint {
  double threshold;
  std::optional<double> fpr_prime;  // 1 - t'
  std::optional<double> s_prime;
  std::optional<double> sigma;
  std::optional<double> tau;
};

struct Roc3D {
  std::vector<Roc3DPoint> points;
};

/// C_k = (k + 1) / 102, k = 0..100: 101 thresholds strictly inside (0, 1),
/// including 0.5.
inline std::vector<double> default_threshold_grid() {
  std::vector<double> g;
  for (int k = 0; k < 101; ++k) g.push_back((k + 1) / 102.0);
  return g;
}

/// Predictive ROC with incertitudes: at each threshold, classify with the
/// abstain rule and record (1 - t', s', sigma, tau).
inline Roc3D roc3d(const ModelSet& ms, const Dataset& test,
                   std::span<const double> thresholds) {
  const auto truth = detail::truth_of(test);
  std::size_t pos = std::count(truth.begin(), truth.end(), 1);
  if (pos == 0 || pos == truth.size()) throw DataError("roc3d: need both classes in truth");
  const auto probs = predict_intervals(ms, test);
  const auto labels = labels_of(test);
  Roc3D out;
  for (double c : thresholds) {
    const auto st = uncertainty_stats(ternary_confusion(classify_all(probs, c, Rule::abstain), labels));
    Roc3DPoint p{c, std::nullopt, st.predictive_sensitivity, st.positive_incertitude,
                 st.negative_incertitude};
    if (st.predictive_specificity) p.fpr_prime = 1.0 - *st.predictive_specificity;
    out.points.push_back(p);
  }
  return out;
}

inline Roc3D roc3d(const ModelSet& ms, const Dataset& test) {
  const auto grid = default_threshold_grid();
  return roc3d(ms, test, grid);
}

}  // namespace ilr

#endif
