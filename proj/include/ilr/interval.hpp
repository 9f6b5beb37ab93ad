#ifndef ILR_INTERVAL_HPP
#define ILR_INTERVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ilr/error.hpp"

namespace ilr {

/// Closed real interval [lo, hi]. A precise value is the degenerate
/// interval [v, v].
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double value) : lo_(value), hi_(value) {}  // NOLINT
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) {
      std::ostringstream os;
      os << "interval bounds out of order: [" << lo << ", " << hi << "]";
      throw std::invalid_argument(os.str());
    }
  }

  constexpr double lo() const noexcept { return lo_; }
  constexpr double hi() const noexcept { return hi_; }
  constexpr double width() const noexcept { return hi_ - lo_; }
  constexpr double midpoint() const noexcept { return (lo_ + hi_) / 2; }
  constexpr bool degenerate() const noexcept { return lo_ == hi_; }
  constexpr bool contains(double v) const noexcept {
    return lo_ <= v && v <= hi_;
  }
  constexpr bool contains(const Interval& other) const noexcept {
    return lo_ <= other.lo_ && other.hi_ <= hi_;
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline Interval interval_make(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("interval bounds must be finite");
  }
  return Interval(lo, hi);
}

/// Smallest interval containing both arguments.
inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

/// Binary label that may be unknown. Unknown stands for the vacuous
/// interval [0, 1].
class UncertainLabel {
 public:
  constexpr UncertainLabel() = default;
  static UncertainLabel known(int y) {
    if (y != 0 && y != 1) {
      throw std::invalid_argument("binary label must be 0 or 1");
    }
    UncertainLabel l;
    l.value_ = y;
    return l;
  }
  static constexpr UncertainLabel unknown() { return UncertainLabel(); }

  constexpr bool is_known() const noexcept { return value_.has_value(); }
  constexpr bool is_unknown() const noexcept { return !value_.has_value(); }
  int value() const {
    if (!value_) throw std::logic_error("label is unknown");
    return *value_;
  }
  Interval as_interval() const {
    return value_ ? Interval(*value_) : Interval(0.0, 1.0);
  }

  friend constexpr bool operator==(const UncertainLabel&,
                                   const UncertainLabel&) = default;

 private:
  std::optional<int> value_;
};

/// Regression vector (beta_0, ..., beta_m); index 0 is the intercept.
class Coefficients {
 public:
  Coefficients() : beta_(1, 0.0) {}
  explicit Coefficients(std::vector<double> beta) : beta_(std::move(beta)) {
    if (beta_.empty()) {
      throw std::invalid_argument("coefficients need at least an intercept");
    }
    for (double b : beta_) {
      if (!std::isfinite(b)) {
        throw std::invalid_argument("coefficients must be finite");
      }
    }
  }

  std::size_t dimension() const noexcept { return beta_.size() - 1; }
  std::size_t size() const noexcept { return beta_.size(); }
  double intercept() const noexcept { return beta_[0]; }
  double operator[](std::size_t i) const { return beta_[i]; }
  std::span<const double> values() const noexcept { return beta_; }
  const std::vector<double>& vector() const noexcept { return beta_; }

  friend bool operator==(const Coefficients&, const Coefficients&) = default;

 private:
  std::vector<double> beta_;
};

inline void check_dimension(const Coefficients& c, std::size_t m) {
  if (c.dimension() != m) {
    throw DataError("dimension mismatch: model has " +
                    std::to_string(c.dimension()) + " features, input has " +
                    std::to_string(m));
  }
}

/// Precise linear score beta_0 + sum beta_i x_i.
inline double linear_score(const Coefficients& c, std::span<const double> x) {
  check_dimension(c, x.size());
  double s = c[0];
  for (std::size_t i = 0; i < x.size(); ++i) s += c[i + 1] * x[i];
  return s;
}

/// Exact range of the linear score over the box x. Each term attains its
/// extremes at an endpoint picked by the sign of its coefficient.
inline Interval linear_score_bounds(const Coefficients& c,
                                    std::span<const Interval> x) {
  check_dimension(c, x.size());
  double lo = c[0];
  double hi = c[0];
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b = c[i + 1];
    if (b >= 0) {
      lo += b * x[i].lo();
      hi += b * x[i].hi();
    } else {
      lo += b * x[i].hi();
      hi += b * x[i].lo();
    }
  }
  return Interval(lo, hi);
}

}  // namespace ilr

#endif
