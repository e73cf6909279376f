#pragma once

// Resampling protocols: K-fold and Monte Carlo cross-validation, seeded
// holdout, and percentile bootstrap intervals.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/eval/metrics.hpp"
#include "petrank/features.hpp"
#include "petrank/models/model.hpp"

namespace petrank {

enum class CvProtocol { kfold, mccv };

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation across folds
  std::size_t defined = 0;  // folds where the metric was defined
};

struct CVReport {
  CvProtocol protocol = CvProtocol::kfold;
  std::size_t k = 0;  // folds (kfold) or iterations (mccv)
  double test_fraction = 0.0;  // mccv only
  double rel_tol = 0.1;
  std::uint64_t seed = 0;
  std::vector<RegressionMetrics> fold_metrics;
  std::vector<std::vector<std::string>> fold_test_names;
  std::map<std::string, MetricSummary> summary;  // keyed by metric name
};

// Row assignment for K folds over n rows: one seeded shuffle, then
// contiguous chunks whose sizes differ by at most one (the first n % k
// folds get the extra row). Errors: TooFewRows, ConfigError.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k,
                                                      std::uint64_t seed);

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;  // round(test_fraction * n) rows
};

// Seeded random split. Errors: BadFraction, TooFewRows.
HoldoutSplit holdout_split(std::size_t n, double test_fraction, std::uint64_t seed);

// Fits on the training rows (fit-time statistics included) and scores the
// held-out rows.
RegressionMetrics evaluate_split(const LearnerSpec& learner, const FeatureMatrix& x,
                                 const std::vector<std::size_t>& train,
                                 const std::vector<std::size_t>& test, double rel_tol);

RegressionMetrics holdout(const LearnerSpec& learner, const FeatureMatrix& x,
                          double test_fraction, double rel_tol, std::uint64_t seed);

// Errors: TooFewRows (k < 2 or n < k).
CVReport kfold_cv(const LearnerSpec& learner, const FeatureMatrix& x, std::size_t k,
                  double rel_tol, std::uint64_t seed);

// Iteration i is holdout(..., seed + i), so iterations = 1 reproduces a
// single holdout evaluation. Errors: BadFraction, TooFewRows.
CVReport mccv(const LearnerSpec& learner, const FeatureMatrix& x, std::size_t iterations,
              double test_fraction, double rel_tol, std::uint64_t seed);

std::map<std::string, MetricSummary> summarize(const std::vector<RegressionMetrics>& folds);

struct BootstrapInterval {
  std::string metric;
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  std::size_t resamples = 0;
  std::size_t redraws = 0;  // resamples discarded because the metric was undefined
  std::uint64_t seed = 0;
};

// Percentile interval over B paired resamples of (y_i, y_hat_i). Quantiles
// use linear interpolation between order statistics; the interval is then
// widened if needed so that lo <= point <= hi.
// Errors: ConfigError (B < 100, level outside (0,1)), plus those of
// regression_metrics, and UndefinedMetric if the point estimate is undefined.
BootstrapInterval bootstrap_ci(MetricName metric, const Eigen::Ref<const VectorXd>& y,
                               const Eigen::Ref<const VectorXd>& y_hat, std::size_t resamples,
                               double level, std::uint64_t seed, double rel_tol = 0.1);

// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

nlohmann::ordered_json to_json(const RegressionMetrics& m);
nlohmann::ordered_json to_json(const CVReport& r);
nlohmann::ordered_json to_json(const BootstrapInterval& b);

}  // namespace petrank
