#include "petrank/models/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "petrank/error.hpp"

namespace petrank {
namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  std::size_t left_count = 0;
  double score = -std::numeric_limits<double>::infinity();
};

// Midpoint that still separates a < b in floating point.
double midpoint(double a, double b) {
  const double m = 0.5 * (a + b);
  return (m >= b || m < a) ? a : m;
}

class Grower {
 public:
  Grower(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
         const GrowOptions& options)
      : x_(x), y_(y), opt_(options), p_(static_cast<std::size_t>(x.cols())) {}

  RegressionTree run(std::vector<std::size_t> rows) {
    grow(rows, 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  int grow(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t n = rows.size();
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (auto r : rows) {
      const double v = y_(static_cast<Index>(r));
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    {
      auto& node = nodes_[static_cast<std::size_t>(id)];
      node.count = n;
      node.value = n == 0 ? 0.0 : sum / (static_cast<double>(n) + opt_.leaf_l2);
    }

    const auto& prm = opt_.params;
    const auto min_leaf = static_cast<std::size_t>(prm.min_samples_leaf);
    const bool depth_left = !prm.max_depth || depth < *prm.max_depth;
    if (!depth_left || n < static_cast<std::size_t>(prm.min_samples_split) ||
        n < 2 * min_leaf || !(hi > lo) || p_ == 0) {
      return id;
    }

    const SplitChoice best = find_split(rows, sum);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    left.reserve(best.left_count);
    right.reserve(n - best.left_count);
    for (auto r : rows) {
      (x_(static_cast<Index>(r), best.feature) <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  SplitChoice find_split(const std::vector<std::size_t>& rows, double sum) {
    std::vector<std::size_t> order(p_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t first_batch = p_;
    if (opt_.params.feature_subsample != FeatureSubsample::all) {
      if (!opt_.rng) throw Error("SchemaInvalid", "feature subsampling requires a seeded rng");
      shuffle(order, *opt_.rng);
      first_batch = subsample_count(opt_.params.feature_subsample, p_);
    }

    // The sampled batch is scanned in ascending feature order so ties
    // resolve to the lowest index. If it yields no valid split, remaining
    // features are drawn one at a time in permutation order.
    std::vector<std::size_t> batch(order.begin(), order.begin() + static_cast<long>(first_batch));
    std::sort(batch.begin(), batch.end());
    SplitChoice best;
    const double parent = parent_score(rows.size(), sum);
    for (auto f : batch) scan_feature(rows, sum, parent, f, best);
    for (std::size_t k = first_batch; best.feature < 0 && k < p_; ++k) {
      scan_feature(rows, sum, parent, order[k], best);
    }
    return best;
  }

  double parent_score(std::size_t n, double sum) const {
    if (opt_.leaf_l2 == 0.0) return 0.0;  // centered: parent sum is zero
    return sum * sum / (static_cast<double>(n) + opt_.leaf_l2);
  }

  void scan_feature(const std::vector<std::size_t>& rows, double sum, double parent,
                    std::size_t f, SplitChoice& best) {
    const auto col = static_cast<Index>(f);
    sorted_.assign(rows.begin(), rows.end());
    std::stable_sort(sorted_.begin(), sorted_.end(), [&](std::size_t a, std::size_t b) {
      return x_(static_cast<Index>(a), col) < x_(static_cast<Index>(b), col);
    });

    const std::size_t n = sorted_.size();
    const auto min_leaf = static_cast<std::size_t>(opt_.params.min_samples_leaf);
    const double lambda = opt_.leaf_l2;
    // Without regularization the score is computed on node-centered
    // targets, which is algebraically identical and numerically steadier.
    const double shift = lambda == 0.0 ? sum / static_cast<double>(n) : 0.0;
    const double total = lambda == 0.0 ? 0.0 : sum;

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += y_(static_cast<Index>(sorted_[i])) - shift;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < min_leaf) continue;
      if (nr < min_leaf) break;
      const double a = x_(static_cast<Index>(sorted_[i]), col);
      const double b = x_(static_cast<Index>(sorted_[i + 1]), col);
      if (!(a < b)) continue;
      const double right_sum = total - left_sum;
      const double score = left_sum * left_sum / (static_cast<double>(nl) + lambda) +
                           right_sum * right_sum / (static_cast<double>(nr) + lambda);
      if (!(score > parent)) continue;
      const double t = midpoint(a, b);
      if (better(score, static_cast<int>(f), t, best)) {
        best.feature = static_cast<int>(f);
        best.threshold = t;
        best.left_count = nl;
        best.score = score;
      }
    }
  }

  static bool better(double score, int feature, double threshold, const SplitChoice& best) {
    if (best.feature < 0) return true;
    // Relative, so tiny-variance targets such as 1/gap^2 are not flattened
    // into ties.
    const double tol = 1e-12 * std::abs(best.score);
    if (score > best.score + tol) return true;
    if (score < best.score - tol) return false;
    return feature < best.feature || (feature == best.feature && threshold < best.threshold);
  }

  const Eigen::Ref<const MatrixXd>& x_;
  const Eigen::Ref<const VectorXd>& y_;
  const GrowOptions& opt_;
  std::size_t p_;
  std::vector<TreeNode> nodes_;
  std::vector<std::size_t> sorted_;
};

int depth_of(const std::vector<TreeNode>& nodes, int at) {
  const auto& node = nodes[static_cast<std::size_t>(at)];
  if (node.is_leaf()) return 0;
  return 1 + std::max(depth_of(nodes, node.left), depth_of(nodes, node.right));
}

}  // namespace

FeatureSubsample parse_feature_subsample(std::string_view raw) {
  if (raw == "all") return FeatureSubsample::all;
  if (raw == "third") return FeatureSubsample::third;
  if (raw == "sqrt") return FeatureSubsample::sqrt;
  throw config_error("feature_subsample must be all, third or sqrt, got '" + std::string(raw) + "'");
}

std::string_view to_string(FeatureSubsample f) {
  switch (f) {
    case FeatureSubsample::third:
      return "third";
    case FeatureSubsample::sqrt:
      return "sqrt";
    default:
      return "all";
  }
}

std::size_t subsample_count(FeatureSubsample mode, std::size_t p) {
  switch (mode) {
    case FeatureSubsample::third:
      return std::max<std::size_t>(1, p / 3);
    case FeatureSubsample::sqrt:
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(p))));
    default:
      return p;
  }
}

void TreeParams::check() const {
  if (max_depth && *max_depth < 1) throw config_error("max_depth must be >= 1");
  if (min_samples_split < 2) throw config_error("min_samples_split must be >= 2");
  if (min_samples_leaf < 1) throw config_error("min_samples_leaf must be >= 1");
}

nlohmann::ordered_json to_json(const TreeParams& p) {
  nlohmann::ordered_json j;
  j["max_depth"] = p.max_depth ? nlohmann::ordered_json(*p.max_depth) : nlohmann::ordered_json(nullptr);
  j["min_samples_split"] = p.min_samples_split;
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["feature_subsample"] = std::string(to_string(p.feature_subsample));
  j["seed"] = p.seed;
  return j;
}

TreeParams tree_params_from_json(const nlohmann::json& j, TreeParams p) {
  try {
    if (j.contains("max_depth")) {
      p.max_depth = j["max_depth"].is_null() ? std::nullopt
                                             : std::optional<int>(j["max_depth"].get<int>());
    }
    if (j.contains("min_samples_split")) p.min_samples_split = j["min_samples_split"].get<int>();
    if (j.contains("min_samples_leaf")) p.min_samples_leaf = j["min_samples_leaf"].get<int>();
    if (j.contains("feature_subsample")) {
      p.feature_subsample = parse_feature_subsample(j["feature_subsample"].get<std::string>());
    }
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("tree params: ") + e.what());
  }
  p.check();
  return p;
}

VectorXd RegressionTree::predict(const Eigen::Ref<const MatrixXd>& x) const {
  VectorXd out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = predict_row(x.row(i));
  return out;
}

int RegressionTree::depth() const { return nodes_.empty() ? 0 : depth_of(nodes_, 0); }

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

void RegressionTree::check_structure(Index n_features) const {
  if (nodes_.empty()) throw Error("CorruptFile", "tree has no nodes");
  const auto size = static_cast<int>(nodes_.size());
  for (int i = 0; i < size; ++i) {
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    if (!std::isfinite(n.value) || !std::isfinite(n.threshold)) {
      throw Error("CorruptFile", "non-finite tree node");
    }
    if (n.is_leaf()) continue;
    // Children are stored after their parent (preorder), which also rules out cycles.
    if (n.feature >= n_features || n.left <= i || n.right <= i || n.left >= size ||
        n.right >= size) {
      throw Error("CorruptFile", "tree node " + std::to_string(i) + " has invalid links");
    }
  }
}

nlohmann::json to_json(const RegressionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.count});
  }
  return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  if (!j.is_array()) throw Error("CorruptFile", "tree payload is not an array");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 6) throw Error("CorruptFile", "bad tree node record");
    TreeNode n;
    n.feature = e[0].get<int>();
    n.threshold = e[1].get<double>();
    n.left = e[2].get<int>();
    n.right = e[3].get<int>();
    n.value = e[4].get<double>();
    n.count = e[5].get<std::size_t>();
    nodes.push_back(n);
  }
  return RegressionTree(std::move(nodes));
}

RegressionTree grow_tree(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                         const std::vector<std::size_t>& rows, const GrowOptions& options) {
  options.params.check();
  if (x.rows() != y.size()) throw Error("SchemaInvalid", "x and y row counts differ");
  if (rows.empty()) throw Error("EmptyMatrix", "no training rows");
  if (!(options.leaf_l2 >= 0.0)) throw config_error("leaf_l2 must be >= 0");
  Grower grower(x, y, options);
  return grower.run(rows);
}

RegressionTree fit_tree(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y,
                        const TreeParams& params) {
  Rng rng(params.seed);
  GrowOptions options{params, 0.0, &rng};
  return grow_tree(x, y, iota_indices(static_cast<std::size_t>(x.rows())), options);
}

}  // namespace petrank
