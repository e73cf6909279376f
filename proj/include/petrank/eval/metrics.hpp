#pragma once

// Point metrics over (y, y_hat) pairs. Free functions accept any Eigen
// vector expression; computation is carried out in double.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "petrank/error.hpp"
#include "petrank/types.hpp"

namespace petrank {

struct RegressionMetrics {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;
  std::optional<double> explained_variance;
  std::optional<double> spearman_rho;  // absent when either side is constant
  double tolerance_accuracy = 0.0;     // percent
};

// How regression_metrics treats a constant target with nonzero residuals.
// strict throws DegenerateVariance; lenient leaves r2 and explained
// variance empty (used for small CV folds).
enum class DegeneracyPolicy { strict, lenient };

// Average (fractional) ranks, 1-based; tied values share the mean of the
// ranks they span.
template <typename Derived>
VectorXd fractional_ranks(const Eigen::MatrixBase<Derived>& v) {
  const Index n = v.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return double(v(a)) < double(v(b)); });
  VectorXd ranks(n);
  for (Index i = 0; i < n;) {
    Index j = i;
    while (j + 1 < n && double(v(order[static_cast<std::size_t>(j + 1)])) ==
                            double(v(order[static_cast<std::size_t>(i)]))) {
      ++j;
    }
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = avg;
    i = j + 1;
  }
  return ranks;
}

template <typename DerivedA, typename DerivedB>
double pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const VectorXd x = a.template cast<double>();
  const VectorXd y = b.template cast<double>();
  const VectorXd xc = x.array() - x.mean();
  const VectorXd yc = y.array() - y.mean();
  const double denom = std::sqrt(xc.squaredNorm() * yc.squaredNorm());
  if (denom == 0.0) throw Error("ConstantInput", "correlation undefined for constant input");
  return std::clamp(xc.dot(yc) / denom, -1.0, 1.0);
}

namespace detail {
template <typename Derived>
bool is_constant(const Eigen::MatrixBase<Derived>& v) {
  for (Index i = 1; i < v.size(); ++i) {
    if (double(v(i)) != double(v(0))) return false;
  }
  return true;
}
}  // namespace detail

// Spearman's rho as the Pearson correlation of fractional ranks.
// Errors: LengthMismatch, TooFewRows (n < 2), ConstantInput.
template <typename DerivedA, typename DerivedB>
double spearman(const Eigen::MatrixBase<DerivedA>& y, const Eigen::MatrixBase<DerivedB>& y_hat) {
  if (y.size() != y_hat.size()) throw Error("LengthMismatch", "spearman inputs differ in length");
  if (y.size() < 2) throw Error("TooFewRows", "spearman needs at least two points");
  if (detail::is_constant(y) || detail::is_constant(y_hat)) {
    throw Error("ConstantInput", "spearman undefined: an input has a single distinct value");
  }
  return pearson(fractional_ranks(y), fractional_ranks(y_hat));
}

// 1 - 6 sum(d^2) / (n (n^2 - 1)); valid only without ties.
template <typename DerivedA, typename DerivedB>
double spearman_closed_form(const Eigen::MatrixBase<DerivedA>& y,
                            const Eigen::MatrixBase<DerivedB>& y_hat) {
  if (y.size() != y_hat.size()) throw Error("LengthMismatch", "spearman inputs differ in length");
  const auto n = static_cast<double>(y.size());
  const VectorXd d = fractional_ranks(y) - fractional_ranks(y_hat);
  return 1.0 - 6.0 * d.squaredNorm() / (n * (n * n - 1.0));
}

// Percentage of rows with |y - y_hat| <= rel_tol * |y|; a zero target only
// counts when |y_hat| <= 1e-12.
template <typename DerivedA, typename DerivedB>
double tolerance_accuracy(const Eigen::MatrixBase<DerivedA>& y,
                          const Eigen::MatrixBase<DerivedB>& y_hat, double rel_tol) {
  Index hits = 0;
  for (Index i = 0; i < y.size(); ++i) {
    const double t = double(y(i));
    const double p = double(y_hat(i));
    const bool ok = t == 0.0 ? std::abs(p) <= 1e-12 : std::abs(t - p) <= rel_tol * std::abs(t);
    hits += ok ? 1 : 0;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(y.size());
}

// Errors: LengthMismatch, EmptyInput, NonFiniteValue, ConfigError (rel_tol),
// DegenerateVariance (strict policy only).
template <typename DerivedA, typename DerivedB>
RegressionMetrics regression_metrics(const Eigen::MatrixBase<DerivedA>& y,
                                     const Eigen::MatrixBase<DerivedB>& y_hat, double rel_tol,
                                     DegeneracyPolicy policy = DegeneracyPolicy::strict) {
  if (y.size() != y_hat.size()) throw Error("LengthMismatch", "y and y_hat differ in length");
  if (y.size() == 0) throw Error("EmptyInput", "no rows to score");
  if (!(rel_tol > 0.0)) throw config_error("rel_tol must be > 0");
  const VectorXd t = y.template cast<double>();
  const VectorXd p = y_hat.template cast<double>();
  if (!t.allFinite() || !p.allFinite()) throw Error("NonFiniteValue", "metric inputs must be finite");

  const auto n = static_cast<double>(t.size());
  const VectorXd resid = t - p;
  RegressionMetrics m;
  m.mse = resid.squaredNorm() / n;
  m.mae = resid.cwiseAbs().sum() / n;

  const double ss_res = resid.squaredNorm();
  const double ss_tot = (t.array() - t.mean()).matrix().squaredNorm();
  const double var_y = ss_tot / n;
  const double var_resid = (resid.array() - resid.mean()).matrix().squaredNorm() / n;
  if (ss_tot == 0.0) {
    if (ss_res == 0.0) {
      m.r2 = 0.0;
      m.explained_variance = 0.0;
    } else if (policy == DegeneracyPolicy::strict) {
      throw Error("DegenerateVariance", "constant target with nonzero residuals");
    }
  } else {
    m.r2 = 1.0 - ss_res / ss_tot;
    m.explained_variance = 1.0 - var_resid / var_y;
  }
  if (t.size() >= 2 && !detail::is_constant(t) && !detail::is_constant(p)) {
    m.spearman_rho = spearman(t, p);
  }
  m.tolerance_accuracy = tolerance_accuracy(t, p, rel_tol);
  return m;
}

enum class MetricName { mse, mae, r2, explained_variance, spearman, tolerance_accuracy };

MetricName parse_metric(std::string_view raw);
std::string_view to_string(MetricName m);
// Value of one metric; empty when undefined on this sample.
std::optional<double> metric_value(const RegressionMetrics& m, MetricName which);

}  // namespace petrank
