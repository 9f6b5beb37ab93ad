#ifndef ILR_GLM_HPP
#define ILR_GLM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ilr/dataset.hpp"
#include "ilr/error.hpp"
#include "ilr/interval.hpp"

namespace ilr {

/// Precise training data in row-major layout. Labels are stored as reals so
/// the same routines serve any label completion.
struct DesignMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;  // features, intercept excluded
  std::vector<double> x;
  std::vector<double> y;

  DesignMatrix() = default;
  DesignMatrix(std::size_t n, std::size_t m) : rows(n), cols(m), x(n * m), y(n) {}

  double& at(std::size_t i, std::size_t j) { return x[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return x[i * cols + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x).subspan(i * cols, cols);
  }
};

/// Rejects any interval cell or unknown label, naming the offending rows.
inline DesignMatrix design_matrix(const Dataset& d) {
  auto bad = d.uncertain_rows();
  if (!bad.empty()) {
    throw DataError("precise dataset required; uncertain rows: " + describe_rows(bad));
  }
  DesignMatrix dm(d.size(), d.dimension());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.dimension(); ++j) dm.at(i, j) = d[i].features[j].lo();
    dm.y[i] = d[i].label.value();
  }
  return dm;
}

inline double predict_proba(const Coefficients& c, std::span<const double> x) {
  return sigmoid(linear_score(c, x));
}

namespace detail {

// log(1 + exp(s)) without overflow.
inline double softplus(double s) {
  return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

// Unclamped logistic, for gradients.
inline double logistic(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

}  // namespace detail

inline double nll(const Coefficients& c, const DesignMatrix& d) {
  check_dimension(c, d.cols);
  double total = 0;
  for (std::size_t i = 0; i < d.rows; ++i) {
    const double s = linear_score(c, d.row(i));
    total += detail::softplus(s) - d.y[i] * s;
  }
  return total;
}

/// Component j is sum_i (pi_i - y_i) x_ij with x_i0 = 1.
inline std::vector<double> nll_gradient(const Coefficients& c, const DesignMatrix& d) {
  check_dimension(c, d.cols);
  std::vector<double> g(d.cols + 1, 0.0);
  for (std::size_t i = 0; i < d.rows; ++i) {
    const auto xi = d.row(i);
    const double r = detail::logistic(linear_score(c, xi)) - d.y[i];
    g[0] += r;
    for (std::size_t j = 0; j < d.cols; ++j) g[j + 1] += r * xi[j];
  }
  return g;
}

inline double nll(const Coefficients& c, const Dataset& d) { return nll(c, design_matrix(d)); }

inline std::vector<double> nll_gradient(const Coefficients& c, const Dataset& d) {
  return nll_gradient(c, design_matrix(d));
}

struct FitOptions {
  double tolerance = 1e-8;        // on the max-norm of the objective gradient
  int max_iterations = 100;
  double ridge = 0.0;             // adds ridge * |beta_{1..m}|^2 / 2
  double separation_cap = 30.0;   // per standardized coefficient
};

struct FitReport {
  bool converged = false;
  int iterations = 0;
  double final_nll = 0;
  double gradient_norm = 0;
  bool separation_detected = false;
};

struct FitResult {
  Coefficients coefficients;
  FitReport report;
};

/// Maximum-likelihood logistic regression by damped Newton (IRLS) on
/// internally standardized features.
///
/// Converged means the max-norm of the gradient of the (optionally
/// ridge-penalized) negative log-likelihood, in the original coordinates, is
/// at or below `tolerance`. If a standardized coefficient would grow past
/// `separation_cap` while the objective is still decreasing, the data are
/// treated as (quasi-)separated: the step is truncated at the cap, the
/// result is flagged and `converged` is false. Zero-variance columns are
/// aliased with the intercept and get coefficient 0.
///
/// The iteration always starts from zero, so the result is a deterministic
/// function of the data; envelope construction relies on that.
inline FitResult fit_mle(const DesignMatrix& d, const FitOptions& opts = {}) {
  const std::size_t n = d.rows;
  const std::size_t m = d.cols;
  const std::size_t p = m + 1;
  if (n == 0) throw DataError("fit: empty dataset");
  for (double v : d.x) {
    if (!std::isfinite(v)) throw DataError("fit: non-finite feature value");
  }
  if (opts.ridge < 0) throw std::invalid_argument("fit: ridge must be >= 0");

  std::vector<double> center(m, 0.0), scale(m, 1.0);
  std::vector<bool> active(m, true);
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += d.at(i, j);
    mean /= static_cast<double>(n);
    double var = 0;
    for (std::size_t i = 0; i < n; ++i) var += (d.at(i, j) - mean) * (d.at(i, j) - mean);
    var /= static_cast<double>(n);
    center[j] = mean;
    if (var > 1e-24 * std::max(1.0, mean * mean)) {
      scale[j] = std::sqrt(var);
    } else {
      active[j] = false;
    }
  }

  Eigen::MatrixXd z(n, p);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      z(i, j + 1) = active[j] ? (d.at(i, j) - center[j]) / scale[j] : 0.0;
    }
    y(i) = d.y[i];
  }
  // Penalty weight per standardized coefficient: ridge * beta_j^2 with
  // beta_j = gamma_j / scale_j.
  Eigen::VectorXd pen = Eigen::VectorXd::Zero(p);
  for (std::size_t j = 0; j < m; ++j) pen(j + 1) = opts.ridge / (scale[j] * scale[j]);

  auto objective = [&](const Eigen::VectorXd& g) {
    Eigen::VectorXd eta = z * g;
    double f = 0;
    for (std::size_t i = 0; i < n; ++i) f += detail::softplus(eta(i)) - y(i) * eta(i);
    return f + 0.5 * (pen.array() * g.array().square()).sum();
  };
  auto to_original = [&](const Eigen::VectorXd& g) {
    std::vector<double> beta(p, 0.0);
    beta[0] = g(0);
    for (std::size_t j = 0; j < m; ++j) {
      if (!active[j]) continue;
      beta[j + 1] = g(j + 1) / scale[j];
      beta[0] -= beta[j + 1] * center[j];
    }
    return beta;
  };
  auto original_gradient_norm = [&](const std::vector<double>& beta) {
    std::vector<double> grad = nll_gradient(Coefficients(beta), d);
    double norm = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const double gj = grad[j] + (j > 0 ? opts.ridge * beta[j] : 0.0);
      norm = std::max(norm, std::abs(gj));
    }
    return norm;
  };

  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(p);
  double f = objective(gamma);
  FitReport report;
  std::vector<double> beta = to_original(gamma);
  report.gradient_norm = original_gradient_norm(beta);

  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd eta = z * gamma;
    Eigen::VectorXd mu(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      mu(i) = detail::logistic(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    Eigen::VectorXd grad = z.transpose() * (mu - y) + pen.cwiseProduct(gamma);
    Eigen::MatrixXd hess = z.transpose() * w.asDiagonal() * z;
    hess.diagonal() += pen;
    for (std::size_t j = 0; j < m; ++j) {
      if (!active[j]) {
        hess.row(j + 1).setZero();
        hess.col(j + 1).setZero();
        hess(j + 1, j + 1) = 1.0;
        grad(j + 1) = 0.0;
      }
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        (ldlt.vectorD().array() > 1e-14 * hess.diagonal().cwiseAbs().maxCoeff()).all()) {
      step = -ldlt.solve(grad);
    } else {
      // Near-singular curvature, typically deep in a separated region.
      double lambda = 1e-8 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
      Eigen::MatrixXd damped = hess;
      damped.diagonal().array() += lambda;
      step = -damped.ldlt().solve(grad);
    }
    if (!step.allFinite()) {
      step = -grad;
    }
    // A small gradient alone is not enough: under separation the gradient
    // decays while Newton keeps taking unit-sized steps toward infinity.
    if (report.gradient_norm <= opts.tolerance && step.cwiseAbs().maxCoeff() <= 1e-3) {
      report.converged = true;
      break;
    }

    // Differences below this are rounding noise in f.
    const double slack = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    double t = 1.0;
    Eigen::VectorXd next = gamma + step;
    double f_next = objective(next);
    for (int halving = 0; halving < 50 && !(f_next <= f + slack); ++halving) {
      t *= 0.5;
      next = gamma + t * step;
      f_next = objective(next);
    }
    report.iterations = it + 1;
    if (!(f_next <= f + slack)) break;  // no descent possible at working precision

    const double peak = next.cwiseAbs().maxCoeff();
    if (peak > opts.separation_cap && f_next < f) {
      // Truncate along the step so the largest coefficient sits on the cap.
      double lo = 0, hi = 1;
      const double gmax = gamma.cwiseAbs().maxCoeff();
      if (gmax < opts.separation_cap) {
        for (int k = 0; k < 60; ++k) {
          const double mid = 0.5 * (lo + hi);
          if ((gamma + mid * (next - gamma)).cwiseAbs().maxCoeff() > opts.separation_cap) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        gamma = gamma + lo * (next - gamma);
      }
      f = objective(gamma);
      report.separation_detected = true;
      break;
    }
    gamma = next;
    f = f_next;
    beta = to_original(gamma);
    report.gradient_norm = original_gradient_norm(beta);
  }

  beta = to_original(gamma);
  report.gradient_norm = original_gradient_norm(beta);
  if (!report.separation_detected && report.gradient_norm <= opts.tolerance) {
    report.converged = true;
  }
  if (report.separation_detected) report.converged = false;
  report.final_nll = nll(Coefficients(beta), d);
  return {Coefficients(std::move(beta)), report};
}

inline FitResult fit_mle(const Dataset& d, const FitOptions& opts = {}) {
  if (d.empty()) throw DataError("fit: empty dataset");
  return fit_mle(design_matrix(d), opts);
}

}  // namespace ilr

#endif
