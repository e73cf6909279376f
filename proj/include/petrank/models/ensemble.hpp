#pragma once

// Tree ensembles: bagged random forest and squared-loss gradient boosting.

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/models/tree.hpp"

namespace petrank {

struct ForestParams {
  int n_trees = 100;
  // Every feature is a split candidate at every node by default; with the
  // four-column numeric block, "third" leaves one candidate per node and
  // cannot order long gaps under the inverse-square target.
  TreeParams tree{std::nullopt, 2, 1, FeatureSubsample::all, 0};
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void check() const;
};

nlohmann::ordered_json to_json(const ForestParams& p);
ForestParams forest_params_from_json(const nlohmann::json& j, ForestParams defaults = {});

// Tree t is grown with its own std::mt19937_64 seeded with (seed + t); that
// generator draws the bootstrap sample first and then drives per-node
// feature subsampling. Prediction is the arithmetic mean over trees.
struct RandomForest {
  std::vector<RegressionTree> trees;

  VectorXd predict(const Eigen::Ref<const MatrixXd>& x) const;
};

RandomForest fit_forest(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                        const ForestParams& params);

struct GbtParams {
  int n_rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double l2_leaf_reg = 1.0;
  std::uint64_t seed = 0;

  void check() const;
};

nlohmann::ordered_json to_json(const GbtParams& p);
GbtParams gbt_params_from_json(const nlohmann::json& j, GbtParams defaults = {});

// F_0 = mean(y); round m fits a depth-limited tree to the residuals
// y - F_{m-1} with leaf values sum/(count + l2_leaf_reg), and
// F_m = F_{m-1} + learning_rate * tree_m.
struct GradientBoosted {
  double base = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;

  VectorXd predict(const Eigen::Ref<const MatrixXd>& x) const;
};

GradientBoosted fit_gbt(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                        const GbtParams& params);

}  // namespace petrank
