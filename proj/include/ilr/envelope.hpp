#ifndef ILR_ENVELOPE_HPP
#define ILR_ENVELOPE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ilr/dataset.hpp"
#include "ilr/error.hpp"
#include "ilr/glm.hpp"
#include "ilr/interval.hpp"
#include "ilr/io.hpp"

namespace ilr {

struct Candidate {
  Coefficients coefficients;
  std::string provenance;
  bool separation = false;
};

/// Finite set of logistic models whose pointwise prediction envelope stands
/// in for the imprecise model of an uncertain dataset.
class ModelSet {
 public:
  ModelSet(std::vector<Candidate> models, std::string digest)
      : models_(std::move(models)), digest_(std::move(digest)) {
    if (models_.empty()) throw std::invalid_argument("ModelSet: no models");
    for (const auto& c : models_) {
      if (c.coefficients.dimension() != models_.front().coefficients.dimension()) {
        throw std::invalid_argument("ModelSet: models differ in dimension");
      }
    }
  }

  /// Single-member set wrapping a precise fit.
  static ModelSet single(Coefficients c, std::string provenance = "precise",
                         bool separation = false, std::string digest = {}) {
    return ModelSet({Candidate{std::move(c), std::move(provenance), separation}},
                    std::move(digest));
  }

  std::size_t size() const noexcept { return models_.size(); }
  std::size_t dimension() const noexcept { return models_.front().coefficients.dimension(); }
  const std::vector<Candidate>& models() const noexcept { return models_; }
  const Candidate& operator[](std::size_t i) const { return models_[i]; }
  const std::string& digest() const noexcept { return digest_; }

  /// Per-coefficient [min, max] over members.
  std::vector<Interval> coefficient_bounds() const {
    std::vector<Interval> out;
    for (std::size_t j = 0; j <= dimension(); ++j) {
      double lo = models_.front().coefficients[j], hi = lo;
      for (const auto& c : models_) {
        lo = std::min(lo, c.coefficients[j]);
        hi = std::max(hi, c.coefficients[j]);
      }
      out.emplace_back(lo, hi);
    }
    return out;
  }

 private:
  std::vector<Candidate> models_;
  std::string digest_;
};

/// Hull over members of the exact probability range on the box x.
inline Interval predict_interval(const ModelSet& ms, std::span<const Interval> x) {
  if (x.size() != ms.dimension()) {
    throw DataError("dimension mismatch: model set has " + std::to_string(ms.dimension()) +
                    " features, input has " + std::to_string(x.size()));
  }
  double lo = 1, hi = 0;
  for (const auto& c : ms.models()) {
    const Interval s = linear_score_bounds(c.coefficients, x);
    lo = std::min(lo, sigmoid(s.lo()));
    hi = std::max(hi, sigmoid(s.hi()));
  }
  return Interval(lo, hi);
}

inline Interval predict_interval(const ModelSet& ms, std::span<const double> x) {
  std::vector<Interval> box(x.begin(), x.end());
  return predict_interval(ms, box);
}

/// Evenly spaced points spanning the hull of feature column `col`.
inline std::vector<double> feature_grid(const Dataset& d, std::size_t points,
                                        std::size_t col = 0) {
  if (d.empty() || col >= d.dimension()) throw DataError("feature_grid: no such column");
  double lo = d[0].features[col].lo(), hi = d[0].features[col].hi();
  for (const auto& p : d.points()) {
    lo = std::min(lo, p.features[col].lo());
    hi = std::max(hi, p.features[col].hi());
  }
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return g;
}

struct ImpreciseOptions {
  int refine_budget = 500;                // fit evaluations per extremization
  double tolerance = 1e-8;                // inner fit gradient tolerance
  bool include_corners = true;            // emit corner fits (always used as seeds)
  std::size_t label_enumeration_limit = 12;  // exact 2^q below this q
  // Extra extremization targets: the linear score at each probe point. When
  // unset and m == 1, a 21-point grid over the feature hull is used.
  std::optional<std::vector<std::vector<double>>> probe_points;
  std::size_t probe_grid = 21;
  FitOptions fit;
};

namespace detail {

inline std::string pad2(std::size_t i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}

// Tag order is the public candidate order, so indices are zero-padded.
inline std::string bits(const std::vector<std::uint8_t>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (auto b : v) s.push_back(b ? '1' : '0');
  return s;
}

struct Cell {
  std::size_t row, col;
  double lo, hi;
};

// Uncertain dataset laid out for repeated refits: the free cells and unknown
// labels are the search coordinates, everything else is fixed.
class Completion {
 public:
  explicit Completion(const Dataset& d) : base_(d.size(), d.dimension()) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d.dimension(); ++j) {
        const Interval& iv = d[i].features[j];
        base_.at(i, j) = iv.lo();
        if (!iv.degenerate()) cells_.push_back({i, j, iv.lo(), iv.hi()});
      }
      if (d[i].label.is_known()) {
        base_.y[i] = d[i].label.value();
      } else {
        unknown_.push_back(i);
      }
    }
    for (std::size_t j = 0; j < d.dimension(); ++j) {
      bool any = std::any_of(cells_.begin(), cells_.end(),
                             [&](const Cell& c) { return c.col == j; });
      if (any) uncertain_cols_.push_back(j);
    }
  }

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<std::size_t>& unknown_rows() const { return unknown_; }
  const std::vector<std::size_t>& uncertain_columns() const { return uncertain_cols_; }

  DesignMatrix realize(std::span<const double> cell_values,
                       std::span<const std::uint8_t> labels) const {
    DesignMatrix dm = base_;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      dm.at(cells_[k].row, cells_[k].col) = cell_values[k];
    }
    for (std::size_t k = 0; k < unknown_.size(); ++k) dm.y[unknown_[k]] = labels[k];
    return dm;
  }

 private:
  DesignMatrix base_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> unknown_;
  std::vector<std::size_t> uncertain_cols_;
};

struct SearchPoint {
  std::vector<double> cells;
  std::vector<std::uint8_t> labels;
  FitResult fit;
};

struct Direction {
  std::vector<double> weights;  // objective is sign * weights . beta
  double sign;
  std::string tag;
};

inline double objective(const Direction& dir, const Coefficients& c) {
  double v = 0;
  for (std::size_t j = 0; j < c.size(); ++j) v += dir.weights[j] * c[j];
  return dir.sign * v;
}

// Bounded derivative-free local search over the free cells and unknown
// labels, maximizing the direction objective of the refitted coefficients.
// Endpoint moves and label flips are swept first; interior points of a cell
// are probed once endpoint sweeps stall.
class Extremizer {
 public:
  Extremizer(const Completion& comp, const Direction& dir, const FitOptions& fit_opts,
             int budget)
      : comp_(comp), dir_(dir), fit_opts_(fit_opts), budget_(budget) {}

  SearchPoint run(SearchPoint start) {
    best_ = std::move(start);
    best_value_ = objective(dir_, best_.fit.coefficients);
    bool improved = true;
    while (improved && used_ < budget_) {
      improved = endpoint_sweep();
      if (!improved && used_ < budget_) improved = interior_sweep();
    }
    return best_;
  }

 private:
  bool better(double v) const {
    return v > best_value_ + 1e-12 * std::max(1.0, std::abs(best_value_));
  }

  // Evaluates a trial point and adopts it when it improves the objective.
  bool try_point(std::vector<double> cells, std::vector<std::uint8_t> labels) {
    if (used_ >= budget_) return false;
    ++used_;
    FitResult fit = fit_mle(comp_.realize(cells, labels), fit_opts_);
    const double v = objective(dir_, fit.coefficients);
    if (!better(v)) return false;
    best_ = SearchPoint{std::move(cells), std::move(labels), std::move(fit)};
    best_value_ = v;
    return true;
  }

  bool endpoint_sweep() {
    bool improved = false;
    for (std::size_t k = 0; k < best_.labels.size() && used_ < budget_; ++k) {
      auto labels = best_.labels;
      labels[k] ^= 1;
      improved |= try_point(best_.cells, std::move(labels));
    }
    const auto& cells = comp_.cells();
    for (std::size_t k = 0; k < cells.size() && used_ < budget_; ++k) {
      const double cur = best_.cells[k];
      for (double target : {cells[k].lo, cells[k].hi}) {
        if (target == cur || best_.cells[k] != cur) continue;
        auto trial = best_.cells;
        trial[k] = target;
        improved |= try_point(std::move(trial), best_.labels);
      }
    }
    return improved;
  }

  // Golden-section search on one coordinate at a time, accepting only
  // improvements over the incumbent.
  bool interior_sweep() {
    constexpr double kInvPhi = 0.6180339887498949;
    bool improved = false;
    const auto& cells = comp_.cells();
    for (std::size_t k = 0; k < cells.size() && used_ < budget_; ++k) {
      double a = cells[k].lo, b = cells[k].hi;
      for (int step = 0; step < 4 && used_ < budget_; ++step) {
        const double x1 = b - kInvPhi * (b - a);
        const double x2 = a + kInvPhi * (b - a);
        auto t1 = best_.cells;
        t1[k] = x1;
        auto t2 = best_.cells;
        t2[k] = x2;
        const bool g1 = try_point(std::move(t1), best_.labels);
        const bool g2 = try_point(std::move(t2), best_.labels);
        improved |= g1 || g2;
        const double at = best_.cells[k];
        if (at <= x1) {
          b = x2;
        } else if (at >= x2) {
          a = x1;
        } else {
          a = x1;
          b = x2;
        }
      }
    }
    return improved;
  }

  const Completion& comp_;
  const Direction& dir_;
  const FitOptions& fit_opts_;
  int budget_;
  int used_ = 0;
  SearchPoint best_;
  double best_value_ = 0;
};

inline void sort_by_provenance(std::vector<Candidate>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Candidate& a, const Candidate& b) {
    return a.provenance < b.provenance;
  });
}

inline Candidate to_candidate(const FitResult& fit, std::string tag) {
  return Candidate{fit.coefficients, std::move(tag), fit.report.separation_detected};
}

}  // namespace detail

/// Envelope approximation of the set of logistic regressions over all
/// datasets consistent with the interval features and unknown labels of d.
///
/// Candidates:
///  - "corner:<LU..>:<y0|y1|->": every uncertain feature column set entirely
///    to its lower (L) or upper (U) endpoints, each under the all-zeros and
///    all-ones completion of unknown labels;
///  - "ext:betaNN:<min|max>": bilevel extremization of each fitted
///    coefficient, seeded with the best corner;
///  - "ext:probeNN:<min|max>": the same for the fitted linear score at each
///    probe point;
///  - "labels:<bits>": with precise features and q unknown labels, q at or
///    below the enumeration limit, all 2^q completions replace the above.
/// Fully precise data give the single candidate "precise".
inline ModelSet fit_imprecise(const Dataset& d, const ImpreciseOptions& opts = {}) {
  if (d.empty()) throw DataError("fit_imprecise: empty dataset");
  if (opts.refine_budget <= 0) throw std::invalid_argument("fit_imprecise: refine_budget must be > 0");
  FitOptions fit_opts = opts.fit;
  fit_opts.tolerance = opts.tolerance;

  const std::size_t m = d.dimension();
  const std::string dig = digest(d);
  const detail::Completion comp(d);
  const auto& cells = comp.cells();
  const std::size_t q = comp.unknown_rows().size();
  std::vector<Candidate> out;

  if (cells.empty() && q == 0) {
    FitResult fit = fit_mle(comp.realize({}, {}), fit_opts);
    out.push_back(detail::to_candidate(fit, "precise"));
    return ModelSet(std::move(out), dig);
  }

  if (cells.empty() && q <= opts.label_enumeration_limit) {
    std::vector<std::uint8_t> labels(q);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << q); ++mask) {
      for (std::size_t k = 0; k < q; ++k) labels[k] = (mask >> (q - 1 - k)) & 1;
      FitResult fit = fit_mle(comp.realize({}, labels), fit_opts);
      out.push_back(detail::to_candidate(fit, "labels:" + detail::bits(labels)));
    }
    detail::sort_by_provenance(out);
    return ModelSet(std::move(out), dig);
  }

  // Column-orientation corners.
  const auto& ucols = comp.uncertain_columns();
  if (ucols.size() > 20) {
    throw LimitExceeded("fit_imprecise: 2^" + std::to_string(ucols.size()) +
                            " orientation corners is too many",
                        std::ldexp(1.0, static_cast<int>(ucols.size())), std::ldexp(1.0, 20));
  }
  std::vector<detail::SearchPoint> corners;
  std::vector<std::string> corner_tags;
  const std::vector<int> completions = q == 0 ? std::vector<int>{-1} : std::vector<int>{0, 1};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ucols.size()); ++mask) {
    std::string orient;
    std::vector<double> values(cells.size());
    for (std::size_t u = 0; u < ucols.size(); ++u) {
      const bool upper = (mask >> (ucols.size() - 1 - u)) & 1;
      orient.push_back(upper ? 'U' : 'L');
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k].col == ucols[u]) values[k] = upper ? cells[k].hi : cells[k].lo;
      }
    }
    if (orient.empty()) orient = "-";
    for (int y : completions) {
      std::vector<std::uint8_t> labels(q, y == 1 ? 1 : 0);
      FitResult fit = fit_mle(comp.realize(values, labels), fit_opts);
      corner_tags.push_back("corner:" + orient + ":" + (y < 0 ? "-" : "y" + std::to_string(y)));
      corners.push_back({values, std::move(labels), std::move(fit)});
    }
  }
  if (opts.include_corners) {
    for (std::size_t k = 0; k < corners.size(); ++k) {
      out.push_back(detail::to_candidate(corners[k].fit, corner_tags[k]));
    }
  }

  std::vector<detail::Direction> dirs;
  for (std::size_t i = 0; i <= m; ++i) {
    std::vector<double> w(m + 1, 0.0);
    w[i] = 1.0;
    dirs.push_back({w, -1.0, "ext:beta" + detail::pad2(i) + ":min"});
    dirs.push_back({w, +1.0, "ext:beta" + detail::pad2(i) + ":max"});
  }
  std::vector<std::vector<double>> probes;
  if (opts.probe_points) {
    probes = *opts.probe_points;
  } else if (m == 1 && opts.probe_grid > 0) {
    for (double x : feature_grid(d, opts.probe_grid)) probes.push_back({x});
  }
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (probes[k].size() != m) throw DataError("fit_imprecise: probe point dimension mismatch");
    std::vector<double> w{1.0};
    w.insert(w.end(), probes[k].begin(), probes[k].end());
    dirs.push_back({w, -1.0, "ext:probe" + detail::pad2(k) + ":min"});
    dirs.push_back({w, +1.0, "ext:probe" + detail::pad2(k) + ":max"});
  }

  for (const auto& dir : dirs) {
    std::size_t seed = 0;
    for (std::size_t k = 1; k < corners.size(); ++k) {
      if (detail::objective(dir, corners[k].fit.coefficients) >
          detail::objective(dir, corners[seed].fit.coefficients)) {
        seed = k;
      }
    }
    detail::Extremizer search(comp, dir, fit_opts, opts.refine_budget);
    detail::SearchPoint best = search.run(corners[seed]);
    out.push_back(detail::to_candidate(best.fit, dir.tag));
  }
  detail::sort_by_provenance(out);
  return ModelSet(std::move(out), dig);
}

struct BruteForceLimits {
  double max_label_combos = 4096;      // 2^12
  double max_feature_corners = 65536;  // 2^16
};

/// Exhaustive oracle: fits every label completion times every per-cell
/// endpoint corner. Exact over the corner lattice, exponential in size.
inline ModelSet fit_imprecise_bruteforce(const Dataset& d, const BruteForceLimits& limits = {},
                                         const FitOptions& fit_opts = {}) {
  if (d.empty()) throw DataError("fit_imprecise_bruteforce: empty dataset");
  const detail::Completion comp(d);
  const std::size_t q = comp.unknown_rows().size();
  const std::size_t k = comp.cells().size();
  const double label_combos = std::ldexp(1.0, static_cast<int>(q));
  const double corner_combos = std::ldexp(1.0, static_cast<int>(k));
  if (label_combos > limits.max_label_combos) {
    throw LimitExceeded("brute force needs 2^" + std::to_string(q) + " = " +
                            format_real(label_combos) + " label completions, limit " +
                            format_real(limits.max_label_combos),
                        label_combos, limits.max_label_combos);
  }
  if (corner_combos > limits.max_feature_corners) {
    throw LimitExceeded("brute force needs 2^" + std::to_string(k) + " = " +
                            format_real(corner_combos) + " feature corners, limit " +
                            format_real(limits.max_feature_corners),
                        corner_combos, limits.max_feature_corners);
  }
  std::vector<Candidate> out;
  std::vector<std::uint8_t> labels(q), corner(k);
  std::vector<double> values(k);
  for (std::uint64_t lm = 0; lm < (std::uint64_t{1} << q); ++lm) {
    for (std::size_t i = 0; i < q; ++i) labels[i] = (lm >> (q - 1 - i)) & 1;
    for (std::uint64_t cm = 0; cm < (std::uint64_t{1} << k); ++cm) {
      for (std::size_t i = 0; i < k; ++i) {
        corner[i] = (cm >> (k - 1 - i)) & 1;
        values[i] = corner[i] ? comp.cells()[i].hi : comp.cells()[i].lo;
      }
      FitResult fit = fit_mle(comp.realize(values, labels), fit_opts);
      out.push_back(detail::to_candidate(
          fit, "bf:y=" + detail::bits(labels) + ":x=" + detail::bits(corner)));
    }
  }
  detail::sort_by_provenance(out);
  return ModelSet(std::move(out), digest(d));
}

// ModelSet JSON: {"models": [{"beta": [...], "provenance": "...",
// "separation": bool}, ...], "digest": "..."}
inline nlohmann::json to_json(const ModelSet& ms) {
  nlohmann::json j;
  auto models = nlohmann::json::array();
  for (const auto& c : ms.models()) {
    models.push_back({{"beta", c.coefficients.vector()},
                      {"provenance", c.provenance},
                      {"separation", c.separation}});
  }
  j["models"] = std::move(models);
  j["digest"] = ms.digest();
  return j;
}

inline ModelSet model_set_from_json(const nlohmann::json& j) {
  try {
    std::vector<Candidate> models;
    for (const auto& m : j.at("models")) {
      models.push_back(Candidate{Coefficients(m.at("beta").get<std::vector<double>>()),
                                 m.value("provenance", std::string()),
                                 m.value("separation", false)});
    }
    return ModelSet(std::move(models), j.value("digest", std::string()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model set json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model set json: ") + e.what());
  }
}

}  // namespace ilr

#endif
