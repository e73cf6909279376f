#include "petrank/models/ensemble.hpp"

#include "petrank/error.hpp"

namespace petrank {

void ForestParams::check() const {
  if (n_trees < 1) throw config_error("n_trees must be >= 1");
  tree.check();
}

nlohmann::ordered_json to_json(const ForestParams& p) {
  nlohmann::ordered_json j;
  j["n_trees"] = p.n_trees;
  j["bootstrap"] = p.bootstrap;
  j["seed"] = p.seed;
  auto tree = to_json(p.tree);
  tree.erase("seed");  // trees are seeded from the forest seed
  j["tree"] = tree;
  return j;
}

ForestParams forest_params_from_json(const nlohmann::json& j, ForestParams p) {
  try {
    if (j.contains("n_trees")) p.n_trees = j["n_trees"].get<int>();
    if (j.contains("bootstrap")) p.bootstrap = j["bootstrap"].get<bool>();
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tree")) p.tree = tree_params_from_json(j["tree"], p.tree);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("forest params: ") + e.what());
  }
  p.check();
  return p;
}

VectorXd RandomForest::predict(const Eigen::Ref<const MatrixXd>& x) const {
  VectorXd sum = VectorXd::Zero(x.rows());
  for (const auto& t : trees) sum += t.predict(x);
  return sum / static_cast<double>(trees.size());
}

RandomForest fit_forest(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                        const ForestParams& params) {
  params.check();
  if (x.rows() == 0) throw Error("EmptyMatrix", "no training rows");
  const auto n = static_cast<std::size_t>(x.rows());
  RandomForest forest;
  forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(params.seed + static_cast<std::uint64_t>(t));
    std::vector<std::size_t> rows;
    if (params.bootstrap) {
      rows.resize(n);
      for (auto& r : rows) r = static_cast<std::size_t>(uniform_index(rng, n));
    } else {
      rows = iota_indices(n);
    }
    GrowOptions options{params.tree, 0.0, &rng};
    forest.trees.push_back(grow_tree(x, y, rows, options));
  }
  return forest;
}

void GbtParams::check() const {
  if (n_rounds < 0) throw config_error("n_rounds must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw config_error("learning_rate must be in (0, 1]");
  }
  if (max_depth < 1) throw config_error("gbt max_depth must be >= 1");
  if (!(l2_leaf_reg >= 0.0)) throw config_error("l2_leaf_reg must be >= 0");
}

nlohmann::ordered_json to_json(const GbtParams& p) {
  nlohmann::ordered_json j;
  j["n_rounds"] = p.n_rounds;
  j["learning_rate"] = p.learning_rate;
  j["max_depth"] = p.max_depth;
  j["l2_leaf_reg"] = p.l2_leaf_reg;
  j["seed"] = p.seed;
  return j;
}

GbtParams gbt_params_from_json(const nlohmann::json& j, GbtParams p) {
  try {
    if (j.contains("n_rounds")) p.n_rounds = j["n_rounds"].get<int>();
    if (j.contains("learning_rate")) p.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("max_depth")) p.max_depth = j["max_depth"].get<int>();
    if (j.contains("l2_leaf_reg")) p.l2_leaf_reg = j["l2_leaf_reg"].get<double>();
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("gbt params: ") + e.what());
  }
  p.check();
  return p;
}

VectorXd GradientBoosted::predict(const Eigen::Ref<const MatrixXd>& x) const {
  VectorXd f = VectorXd::Constant(x.rows(), base);
  for (const auto& t : trees) f += learning_rate * t.predict(x);
  return f;
}

GradientBoosted fit_gbt(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                        const GbtParams& params) {
  params.check();
  if (x.rows() == 0) throw Error("EmptyMatrix", "no training rows");
  GradientBoosted model;
  model.base = y.mean();
  model.learning_rate = params.learning_rate;

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.seed = params.seed;
  const GrowOptions options{tp, params.l2_leaf_reg, nullptr};
  const auto rows = iota_indices(static_cast<std::size_t>(x.rows()));

  VectorXd f = VectorXd::Constant(x.rows(), model.base);
  for (int m = 0; m < params.n_rounds; ++m) {
    const VectorXd residual = y - f;
    model.trees.push_back(grow_tree(x, residual, rows, options));
    f += params.learning_rate * model.trees.back().predict(x);
  }
  return model;
}

}  // namespace petrank
