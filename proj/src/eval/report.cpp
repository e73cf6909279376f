#include "petrank/eval/report.hpp"

#include <cstdio>

namespace petrank {
namespace {

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string cell(const EvalReport& r, MetricName which) {
  const auto v = metric_value(r.metrics, which);
  if (!v) return "n/a";
  std::string out = short_number(*v);
  for (const auto& b : r.intervals) {
    if (b.metric == to_string(which)) {
      out += " [" + short_number(b.lo) + ", " + short_number(b.hi) + "]";
    }
  }
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model_kind;
  j["target"] = r.target;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["rel_tol"] = r.rel_tol;
  j["metrics"] = to_json(r.metrics);
  j["bootstrap"] = nlohmann::ordered_json::array();
  for (const auto& b : r.intervals) j["bootstrap"].push_back(to_json(b));
  j["target_leakage"] = r.target_leakage;
  if (r.target_leakage) j["notice"] = kTargetLeakageNotice;
  return j;
}

std::string to_markdown(const EvalReport& r) {
  char tol[32];
  std::snprintf(tol, sizeof tol, "Tol-%g%% Acc.", r.rel_tol * 100.0);
  std::string out;
  out += "| Model | MSE | MAE | R² | ρ | Expl. Var. | " + std::string(tol) + " |\n";
  out += "|---|---|---|---|---|---|---|\n";
  out += "| " + r.model_kind + " | " + cell(r, MetricName::mse) + " | " + cell(r, MetricName::mae) +
         " | " + cell(r, MetricName::r2) + " | " + cell(r, MetricName::spearman) + " | " +
         cell(r, MetricName::explained_variance) + " | " +
         cell(r, MetricName::tolerance_accuracy) + " |\n";
  out += "\nTarget: " + r.target + ". Train rows: " + std::to_string(r.n_train) +
         ". Test rows: " + std::to_string(r.n_test) + ".\n";
  if (r.target_leakage) out += "\n> " + std::string(kTargetLeakageNotice) + "\n";
  return out;
}

}  // namespace petrank
