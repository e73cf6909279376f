#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/rng.hpp"
#include "petrank/types.hpp"

namespace petrank {

enum class FeatureSubsample { all, third, sqrt };

FeatureSubsample parse_feature_subsample(std::string_view raw);
std::string_view to_string(FeatureSubsample f);

// Number of candidate features examined per node for p columns.
std::size_t subsample_count(FeatureSubsample mode, std::size_t p);

struct TreeParams {
  std::optional<int> max_depth;  // nullopt = unbounded
  int min_samples_split = 2;
  int min_samples_leaf = 1;
  FeatureSubsample feature_subsample = FeatureSubsample::all;
  std::uint64_t seed = 0;

  void check() const;  // throws ConfigError
};

nlohmann::ordered_json to_json(const TreeParams& p);
TreeParams tree_params_from_json(const nlohmann::json& j, TreeParams defaults = {});

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf prediction
  std::size_t count = 0;  // training rows reaching the node

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& root() const { return nodes_.front(); }

  template <typename Derived>
  double predict_row(const Eigen::MatrixBase<Derived>& x) const {
    int at = 0;
    while (!nodes_[static_cast<std::size_t>(at)].is_leaf()) {
      const auto& node = nodes_[static_cast<std::size_t>(at)];
      at = x(node.feature) <= node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(at)].value;
  }

  VectorXd predict(const Eigen::Ref<const MatrixXd>& x) const;

  int depth() const;
  std::size_t leaf_count() const;

  // Structural validation for deserialized trees; throws CorruptFile.
  void check_structure(Index n_features) const;

 private:
  std::vector<TreeNode> nodes_;
};

nlohmann::json to_json(const RegressionTree& tree);
RegressionTree tree_from_json(const nlohmann::json& j);

// Split-search options shared by the tree, forest and boosting learners.
struct GrowOptions {
  TreeParams params;
  // Leaf value = sum / (count + leaf_l2); split score uses the same
  // regularized form. 0 gives plain CART (leaf = mean, SSE reduction).
  double leaf_l2 = 0.0;
  // Source of per-node feature subsampling; required unless subsample=all.
  Rng* rng = nullptr;
};

// Greedy exact CART on the given rows (duplicates allowed, as produced by
// bootstrap resampling). At each node, every (feature, threshold) candidate
// is scored, thresholds being midpoints between consecutive distinct sorted
// values; the best reduction wins, ties going to the lowest feature index
// and then the lowest threshold. Growth stops at max_depth, when the node has
// fewer than min_samples_split rows, when no split leaves min_samples_leaf
// rows on both sides, or when the targets are constant.
RegressionTree grow_tree(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                         const std::vector<std::size_t>& rows, const GrowOptions& options);

// All rows, no regularization.
RegressionTree fit_tree(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                        const TreeParams& params);

}  // namespace petrank
