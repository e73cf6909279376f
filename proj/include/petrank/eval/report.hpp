#pragma once

// Evaluation report: held-out metrics, optional bootstrap intervals, and the
// markdown table rendering.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/eval/validation.hpp"

namespace petrank {

struct EvalReport {
  std::string model_kind;
  std::string target;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double rel_tol = 0.1;
  RegressionMetrics metrics;
  std::vector<BootstrapInterval> intervals;
  // Set when gap_days is among the inputs while the target is derived from it.
  bool target_leakage = false;
};

inline constexpr const char* kTargetLeakageNotice =
    "Target leakage: the target is a deterministic transform of gap_days, which is also an "
    "input feature. Near-perfect scores are expected and do not measure ranking skill. Rerun "
    "with --exclude-gap-features for an honest baseline.";

nlohmann::ordered_json to_json(const EvalReport& r);

// Columns: Model | MSE | MAE | R² | ρ | Expl. Var. | Tol-10% Acc.
// Undefined values render as "n/a"; metrics with a bootstrap interval render
// as "point [lo, hi]".
std::string to_markdown(const EvalReport& r);

}  // namespace petrank
