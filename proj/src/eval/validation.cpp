#include "petrank/eval/validation.hpp"

#include <cmath>

#include "petrank/rng.hpp"

namespace petrank {
namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

constexpr MetricName kAllMetrics[] = {MetricName::mse,
                                      MetricName::mae,
                                      MetricName::r2,
                                      MetricName::explained_variance,
                                      MetricName::spearman,
                                      MetricName::tolerance_accuracy};

}  // namespace

MetricName parse_metric(std::string_view raw) {
  for (auto m : kAllMetrics) {
    if (to_string(m) == raw) return m;
  }
  throw config_error("unknown metric '" + std::string(raw) + "'");
}

std::string_view to_string(MetricName m) {
  switch (m) {
    case MetricName::mse:
      return "mse";
    case MetricName::mae:
      return "mae";
    case MetricName::r2:
      return "r2";
    case MetricName::explained_variance:
      return "explained_variance";
    case MetricName::spearman:
      return "spearman_rho";
    default:
      return "tolerance_accuracy";
  }
}

std::optional<double> metric_value(const RegressionMetrics& m, MetricName which) {
  switch (which) {
    case MetricName::mse:
      return m.mse;
    case MetricName::mae:
      return m.mae;
    case MetricName::r2:
      return m.r2;
    case MetricName::explained_variance:
      return m.explained_variance;
    case MetricName::spearman:
      return m.spearman_rho;
    default:
      return m.tolerance_accuracy;
  }
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k,
                                                      std::uint64_t seed) {
  if (k < 2) throw Error("TooFewRows", "k-fold needs k >= 2");
  if (n < k) throw Error("TooFewRows", std::to_string(n) + " rows for " + std::to_string(k) + " folds");
  auto order = iota_indices(n);
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t at = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<long>(at),
                    order.begin() + static_cast<long>(at + size));
    at += size;
  }
  return folds;
}

HoldoutSplit holdout_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("BadFraction", "test_fraction must be in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test < 1 || n_test >= n) {
    throw Error("TooFewRows", std::to_string(n) + " rows cannot be split with test_fraction " +
                                  std::to_string(test_fraction));
  }
  auto order = iota_indices(n);
  Rng rng(seed);
  shuffle(order, rng);
  HoldoutSplit split;
  split.test.assign(order.begin(), order.begin() + static_cast<long>(n_test));
  split.train.assign(order.begin() + static_cast<long>(n_test), order.end());
  return split;
}

RegressionMetrics evaluate_split(const LearnerSpec& learner, const FeatureMatrix& x,
                                 const std::vector<std::size_t>& train,
                                 const std::vector<std::size_t>& test, double rel_tol) {
  const auto train_m = x.subset(train);
  const auto test_m = x.subset(test);
  const auto model = fit(learner, train_m);
  const VectorXd y_hat = predict(model, test_m);
  return regression_metrics(test_m.target, y_hat, rel_tol, DegeneracyPolicy::lenient);
}

RegressionMetrics holdout(const LearnerSpec& learner, const FeatureMatrix& x,
                          double test_fraction, double rel_tol, std::uint64_t seed) {
  const auto split = holdout_split(static_cast<std::size_t>(x.rows()), test_fraction, seed);
  return evaluate_split(learner, x, split.train, split.test, rel_tol);
}

std::map<std::string, MetricSummary> summarize(const std::vector<RegressionMetrics>& folds) {
  std::map<std::string, MetricSummary> out;
  for (auto which : kAllMetrics) {
    std::vector<double> values;
    for (const auto& f : folds) {
      if (auto v = metric_value(f, which)) values.push_back(*v);
    }
    MetricSummary s;
    s.defined = values.size();
    if (!values.empty()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(values.size()));
    }
    out.emplace(std::string(to_string(which)), s);
  }
  return out;
}

CVReport kfold_cv(const LearnerSpec& learner, const FeatureMatrix& x, std::size_t k,
                  double rel_tol, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto folds = kfold_partition(n, k, seed);
  CVReport report;
  report.protocol = CvProtocol::kfold;
  report.k = k;
  report.rel_tol = rel_tol;
  report.seed = seed;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    train.reserve(n - folds[f].size());
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    }
    report.fold_metrics.push_back(evaluate_split(learner, x, train, folds[f], rel_tol));
    std::vector<std::string> names;
    for (auto r : folds[f]) names.push_back(x.names[r]);
    report.fold_test_names.push_back(std::move(names));
  }
  report.summary = summarize(report.fold_metrics);
  return report;
}

CVReport mccv(const LearnerSpec& learner, const FeatureMatrix& x, std::size_t iterations,
              double test_fraction, double rel_tol, std::uint64_t seed) {
  if (iterations < 1) throw Error("TooFewRows", "mccv needs at least one iteration");
  CVReport report;
  report.protocol = CvProtocol::mccv;
  report.k = iterations;
  report.test_fraction = test_fraction;
  report.rel_tol = rel_tol;
  report.seed = seed;
  const auto n = static_cast<std::size_t>(x.rows());
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto split = holdout_split(n, test_fraction, seed + i);
    report.fold_metrics.push_back(evaluate_split(learner, x, split.train, split.test, rel_tol));
    std::vector<std::string> names;
    for (auto r : split.test) names.push_back(x.names[r]);
    report.fold_test_names.push_back(std::move(names));
  }
  report.summary = summarize(report.fold_metrics);
  return report;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error("EmptyInput", "quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapInterval bootstrap_ci(MetricName metric, const Eigen::Ref<const VectorXd>& y,
                               const Eigen::Ref<const VectorXd>& y_hat, std::size_t resamples,
                               double level, std::uint64_t seed, double rel_tol) {
  if (resamples < 100) throw config_error("bootstrap needs at least 100 resamples");
  if (!(level > 0.0 && level < 1.0)) throw config_error("bootstrap level must be in (0, 1)");
  const auto point = metric_value(
      regression_metrics(y, y_hat, rel_tol, DegeneracyPolicy::lenient), metric);
  if (!point) {
    throw Error("UndefinedMetric", std::string(to_string(metric)) + " undefined on the full sample");
  }

  BootstrapInterval out;
  out.metric = std::string(to_string(metric));
  out.point = *point;
  out.level = level;
  out.resamples = resamples;
  out.seed = seed;

  const auto n = static_cast<std::size_t>(y.size());
  const std::size_t max_redraws = 100 * resamples;
  Rng rng(seed);
  VectorXd ys(y.size()), ps(y.size());
  std::vector<double> values;
  values.reserve(resamples);
  while (values.size() < resamples) {
    for (Index i = 0; i < y.size(); ++i) {
      const auto r = static_cast<Index>(uniform_index(rng, n));
      ys(i) = y(r);
      ps(i) = y_hat(r);
    }
    const auto v = metric_value(regression_metrics(ys, ps, rel_tol, DegeneracyPolicy::lenient), metric);
    if (!v) {
      if (++out.redraws > max_redraws) {
        throw Error("UndefinedMetric", out.metric + " undefined on too many resamples");
      }
      continue;
    }
    values.push_back(*v);
  }
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - level) / 2.0;
  out.lo = std::min(quantile_sorted(values, tail), out.point);
  out.hi = std::max(quantile_sorted(values, 1.0 - tail), out.point);
  return out;
}

nlohmann::ordered_json to_json(const RegressionMetrics& m) {
  nlohmann::ordered_json j;
  j["mse"] = m.mse;
  j["mae"] = m.mae;
  j["r2"] = optional_number(m.r2);
  j["explained_variance"] = optional_number(m.explained_variance);
  j["spearman_rho"] = optional_number(m.spearman_rho);
  j["tolerance_accuracy"] = m.tolerance_accuracy;
  return j;
}

nlohmann::ordered_json to_json(const CVReport& r) {
  nlohmann::ordered_json j;
  j["protocol"] = r.protocol == CvProtocol::kfold ? "kfold" : "mccv";
  j[r.protocol == CvProtocol::kfold ? "k" : "iterations"] = r.k;
  if (r.protocol == CvProtocol::mccv) j["test_fraction"] = r.test_fraction;
  j["rel_tol"] = r.rel_tol;
  j["seed"] = r.seed;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (auto which : kAllMetrics) {
    const auto& s = r.summary.at(std::string(to_string(which)));
    const auto defined = [&](double v) {
      return s.defined ? std::optional<double>(v) : std::nullopt;
    };
    nlohmann::ordered_json entry;
    entry["mean"] = optional_number(defined(s.mean));
    entry["stddev"] = optional_number(defined(s.stddev));
    entry["defined_folds"] = s.defined;
    summary[std::string(to_string(which))] = entry;
  }
  j["summary"] = summary;
  j["folds"] = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < r.fold_metrics.size(); ++f) {
    auto fold = to_json(r.fold_metrics[f]);
    fold["test_names"] = r.fold_test_names[f];
    j["folds"].push_back(fold);
  }
  return j;
}

nlohmann::ordered_json to_json(const BootstrapInterval& b) {
  nlohmann::ordered_json j;
  j["metric"] = b.metric;
  j["point"] = b.point;
  j["lo"] = b.lo;
  j["hi"] = b.hi;
  j["level"] = b.level;
  j["resamples"] = b.resamples;
  j["redraws"] = b.redraws;
  j["seed"] = b.seed;
  return j;
}

}  // namespace petrank
