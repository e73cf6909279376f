#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "petrank/models/model.hpp"
#include "support.hpp"

using namespace petrank;
using testsupport::random_matrix;
using testsupport::random_vector;

namespace {

FeatureMatrix matrix_of(const MatrixXd& x, const VectorXd& y) {
  FeatureMatrix m;
  for (Index c = 0; c < x.cols(); ++c) m.schema.numeric_names.push_back("f" + std::to_string(c));
  m.schema.target_name = "y";
  m.values = x;
  m.target = y;
  for (Index i = 0; i < x.rows(); ++i) m.names.push_back("2008_" + std::to_string(i + 1) + ".txt");
  return m;
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

double mse(const VectorXd& a, const VectorXd& b) { return (a - b).squaredNorm() / double(a.size()); }

const MatrixXd kFour = (MatrixXd(4, 1) << 1, 2, 3, 4).finished();
const VectorXd kStep = (VectorXd(4) << 0, 0, 1, 1).finished();

}  // namespace

TEST_CASE("tree: depth-1 split on the four-point step") {
  TreeParams p;
  p.max_depth = 1;
  const auto t = fit_tree(kFour, kStep, p);
  REQUIRE_FALSE(t.root().is_leaf());
  CHECK(t.root().feature == 0);
  CHECK(t.root().threshold == 2.5);
  CHECK(t.nodes()[t.root().left].value == 0.0);
  CHECK(t.nodes()[t.root().right].value == 1.0);
}

TEST_CASE("tree: degenerate inputs give one leaf") {
  const auto c = fit_tree(kFour, VectorXd::Constant(4, 3.5), TreeParams{});
  CHECK(c.nodes().size() == 1);
  CHECK(c.predict(kFour) == VectorXd::Constant(4, 3.5));

  const auto one = fit_tree(MatrixXd::Constant(1, 2, 1.0), VectorXd::Constant(1, -2.0), TreeParams{});
  CHECK(one.nodes().size() == 1);
  CHECK(one.root().value == -2.0);
}

TEST_CASE("tree: structural invariants hold on random data") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXd x = random_matrix(rng, 60, 3);
    const VectorXd y = random_vector(rng, 60);
    TreeParams p;
    p.max_depth = 1 + rep % 5;
    p.min_samples_leaf = 1 + rep % 4;
    const auto t = fit_tree(x, y, p);
    CHECK(t.depth() <= *p.max_depth);
    std::size_t total = 0;
    for (const auto& node : t.nodes()) {
      if (node.is_leaf()) {
        CHECK(node.count >= static_cast<std::size_t>(p.min_samples_leaf));
        total += node.count;
      } else {
        CHECK(t.nodes()[node.left].count + t.nodes()[node.right].count == node.count);
      }
    }
    CHECK(total == 60);
    CHECK_NOTHROW(t.check_structure(3));
  }
}

TEST_CASE("tree: leaf values are the mean of their rows") {
  Rng rng(4);
  const MatrixXd x = random_matrix(rng, 40, 2);
  const VectorXd y = random_vector(rng, 40);
  TreeParams p;
  p.max_depth = 3;
  const auto t = fit_tree(x, y, p);
  std::map<double, std::vector<double>> by_leaf;
  for (Index i = 0; i < 40; ++i) by_leaf[t.predict_row(x.row(i))].push_back(y(i));
  for (const auto& [value, ys] : by_leaf) {
    double s = 0.0;
    for (double v : ys) s += v;
    CHECK(value == doctest::Approx(s / double(ys.size())).epsilon(1e-12));
  }
}

TEST_CASE("tree: root split matches the brute-force oracle") {
  Rng rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 2 + static_cast<Index>(uniform_index(rng, 29));
    const Index p = 1 + static_cast<Index>(uniform_index(rng, 3));
    MatrixXd x = random_matrix(rng, n, p);
    if (rep % 3 == 0) x = (x * 3.0).array().round();  // duplicate values and exact ties
    VectorXd y = random_vector(rng, n);
    if (rep % 4 == 0) y = (y * 2.0).array().round();
    const auto expected = oracle::best_root_split(x, y);
    TreeParams prm;
    prm.max_depth = 1;
    const auto t = fit_tree(x, y, prm);
    if (expected.feature < 0 || expected.sse >= oracle::sse_of({y.data(), y.data() + n})) {
      CHECK(t.root().is_leaf());
      continue;
    }
    REQUIRE_FALSE(t.root().is_leaf());
    CHECK(t.root().feature == expected.feature);
    CHECK(t.root().threshold == expected.threshold);
  }
}

TEST_CASE("tree: monotone fit law") {
  Rng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    const MatrixXd x = random_matrix(rng, 50, 3);
    const VectorXd y = random_vector(rng, 50);
    TreeParams shallow;
    shallow.max_depth = 1;
    const double var = (y.array() - y.mean()).square().mean();
    const double m1 = mse(y, fit_tree(x, y, shallow).predict(x));
    const double deep = mse(y, fit_tree(x, y, TreeParams{}).predict(x));
    CHECK(deep <= m1 + 1e-15);
    CHECK(m1 <= var + 1e-15);
  }
}

TEST_CASE("tree and OLS predictions are invariant to row order") {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixXd x = random_matrix(rng, 40, 3);
    const VectorXd y = random_vector(rng, 40);
    auto perm = iota_indices(40);
    shuffle(perm, rng);
    MatrixXd xp(40, 3);
    VectorXd yp(40);
    for (Index i = 0; i < 40; ++i) {
      xp.row(i) = x.row(static_cast<Index>(perm[static_cast<std::size_t>(i)]));
      yp(i) = y(static_cast<Index>(perm[static_cast<std::size_t>(i)]));
    }
    const MatrixXd probe = random_matrix(rng, 25, 3);
    const VectorXd a = fit_tree(x, y, TreeParams{}).predict(probe);
    const VectorXd b = fit_tree(xp, yp, TreeParams{}).predict(probe);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    const VectorXd la = fit_ols(x, y).predict(probe);
    const VectorXd lb = fit_ols(xp, yp).predict(probe);
    CHECK((la - lb).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("forest of one tree equals the tree") {
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const Index n = 5 + static_cast<Index>(uniform_index(rng, 60));
    const Index p = 1 + static_cast<Index>(uniform_index(rng, 5));
    const MatrixXd x = random_matrix(rng, n, p);
    const VectorXd y = random_vector(rng, n);
    ForestParams fp;
    fp.n_trees = 1;
    fp.bootstrap = false;
    fp.tree.max_depth = rep % 2 ? std::optional<int>(1 + rep % 6) : std::nullopt;
    fp.seed = static_cast<std::uint64_t>(rep);
    const MatrixXd probe = random_matrix(rng, 30, p);
    CHECK(fit_forest(x, y, fp).predict(probe) == fit_tree(x, y, fp.tree).predict(probe));
  }
}

TEST_CASE("forest predictions stay within the target range and are seeded") {
  ForestParams fp;
  fp.n_trees = 50;
  fp.seed = 3;
  const auto f = fit_forest(kFour, kStep, fp);
  const VectorXd pred = f.predict(kFour);
  CHECK(pred.minCoeff() >= 0.0);
  CHECK(pred.maxCoeff() <= 1.0);

  const auto fm = matrix_of(kFour, kStep);
  LearnerSpec spec;
  spec.kind = ModelKind::forest;
  spec.forest = fp;
  const auto a = fit(spec, fm);
  const auto b = fit(spec, fm);
  CHECK(a.fingerprint == b.fingerprint);
  spec.forest.seed = 4;
  Rng rng(1);
  const MatrixXd x = random_matrix(rng, 30, 2);
  const VectorXd y = random_vector(rng, 30);
  spec.forest.tree.feature_subsample = FeatureSubsample::sqrt;
  const auto c = fit(spec, matrix_of(x, y));
  spec.forest.seed = 5;
  const auto d = fit(spec, matrix_of(x, y));
  CHECK(c.fingerprint.state_hash != d.fingerprint.state_hash);
}

TEST_CASE("feature subsample counts") {
  CHECK(subsample_count(FeatureSubsample::all, 4) == 4);
  CHECK(subsample_count(FeatureSubsample::third, 4) == 1);
  CHECK(subsample_count(FeatureSubsample::third, 388) == 129);
  CHECK(subsample_count(FeatureSubsample::sqrt, 388) == 19);
  CHECK(subsample_count(FeatureSubsample::third, 2) == 1);
}

TEST_CASE("gbt") {
  GbtParams zero;
  zero.n_rounds = 0;
  const auto c = fit_gbt(kFour, kStep, zero);
  CHECK(c.predict(kFour) == VectorXd::Constant(4, 0.5));

  const VectorXd y = (VectorXd(4) << 3.0, -1.0, 7.5, 2.0).finished();
  GbtParams exact;
  exact.learning_rate = 1.0;
  exact.l2_leaf_reg = 0.0;
  exact.max_depth = 4;
  exact.n_rounds = 5;
  CHECK(mse(y, fit_gbt(kFour, y, exact).predict(kFour)) <= 1e-10);

  GbtParams heavy;
  heavy.l2_leaf_reg = 1e12;
  const VectorXd p = fit_gbt(kFour, y, heavy).predict(kFour);
  CHECK((p.array() - y.mean()).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("ols") {
  const MatrixXd x = (MatrixXd(3, 1) << 0, 1, 2).finished();
  const VectorXd y = (VectorXd(3) << 1, 3, 5).finished();
  const auto m = fit_ols(x, y);
  CHECK(std::abs(m.coef(0) - 2.0) <= 1e-8);
  CHECK(std::abs(m.intercept - 1.0) <= 1e-8);

  MatrixXd xc(4, 2);
  xc << 1, 5, 2, 5, 3, 5, 4, 5;
  const auto guarded = fit_ols(xc, (VectorXd(4) << 1, 2, 3, 4).finished());
  CHECK(guarded.coef.allFinite());
  CHECK(std::isfinite(guarded.intercept));

  const auto flat = fit_ols(x, VectorXd::Constant(3, 4.0));
  CHECK(std::abs(flat.coef(0)) <= 1e-12);
  CHECK(std::abs(flat.intercept - 4.0) <= 1e-12);
}

TEST_CASE("ols matches a QR least-squares oracle") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXd x = random_matrix(rng, 40, 4);
    const VectorXd y = random_vector(rng, 40);
    const auto m = fit_ols(x, y);
    const VectorXd ref = oracle::ols_with_intercept(x, y);
    CHECK(std::abs(m.intercept - ref(0)) <= 1e-8);
    CHECK((m.coef - ref.tail(4)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("elastic net: lambda 0 is least squares") {
  Rng rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixXd x = random_matrix(rng, 80, 3);
    const VectorXd y = x * (VectorXd(3) << 1.5, -2.0, 0.5).finished() + 0.1 * random_vector(rng, 80);
    ElasticNetParams p;
    p.lambda = 0.0;
    const auto fit = fit_elastic_net(x, y, p);
    CHECK(fit.converged);
    const VectorXd ref = oracle::ols_with_intercept(x, y);
    CHECK((fit.model.coef - ref.tail(3)).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(std::abs(fit.model.intercept - ref(0)) <= 1e-6);
  }
}

TEST_CASE("elastic net: pure lasso with a large penalty zeroes every coefficient") {
  Rng rng(6);
  const MatrixXd x = random_matrix(rng, 30, 4);
  const VectorXd y = random_vector(rng, 30) * 10.0;
  ElasticNetParams p;
  p.alpha = 1.0;
  p.lambda = 1e6;
  const auto fit = fit_elastic_net(x, y, p);
  CHECK(fit.model.coef.isZero(0.0));
  CHECK(fit.model.intercept == doctest::Approx(y.mean()).epsilon(1e-12));
}

TEST_CASE("elastic net: ridge shrinks by the closed-form factor") {
  // One standardized column: beta = beta_ols / (1 + lambda).
  const MatrixXd x = (MatrixXd(4, 1) << -1.5, -0.5, 0.5, 1.5).finished() / std::sqrt(1.25);
  const VectorXd y = 2.0 * x.col(0);
  ElasticNetParams p;
  p.alpha = 0.0;
  p.lambda = 0.5;
  p.tol = 1e-12;
  const auto fit = fit_elastic_net(x, y, p);
  CHECK(fit.model.coef(0) > 0.0);
  CHECK(fit.model.coef(0) < 2.0);
  CHECK(fit.model.coef(0) == doctest::Approx(2.0 / 1.5).epsilon(1e-10));
}

TEST_CASE("elastic net: KKT conditions hold at convergence") {
  Rng rng(12);
  for (double alpha : {0.0, 0.3, 0.5, 1.0}) {
    for (double lambda : {0.01, 0.1, 1.0}) {
      MatrixXd x = random_matrix(rng, 50, 5);
      x = (x.rowwise() - x.colwise().mean()).eval();
      const VectorXd y = x.col(0) * 3.0 - x.col(2) + random_vector(rng, 50);
      ElasticNetParams p;
      p.alpha = alpha;
      p.lambda = lambda;
      const auto fit = fit_elastic_net(x, y, p);
      REQUIRE(fit.converged);
      CHECK(elastic_net_kkt_residuals(x, y, fit.model, p).maxCoeff() <= 10.0 * p.tol);
    }
  }
}

TEST_CASE("elastic net flags unstandardized input") {
  MatrixXd x = (MatrixXd(4, 1) << 10, 11, 12, 13).finished();
  const auto fit = fit_elastic_net(x, (VectorXd(4) << 1, 2, 3, 4).finished(), ElasticNetParams{});
  CHECK(fit.not_standardized);
}

TEST_CASE("save and load reproduce predictions for every learner") {
  Rng rng(10);
  const MatrixXd x = random_matrix(rng, 10, 3);
  const VectorXd y = random_vector(rng, 10);
  const auto fm = matrix_of(x, y);
  testsupport::TempDir dir;
  for (auto kind : {ModelKind::tree, ModelKind::forest, ModelKind::gbt, ModelKind::ols,
                    ModelKind::elastic_net}) {
    LearnerSpec spec;
    spec.kind = kind;
    spec.forest.n_trees = 7;
    spec.gbt.n_rounds = 9;
    spec.elastic_net.lambda = 0.05;
    const auto model = fit(spec, fm);
    const auto path = dir / (std::string(to_string(kind)) + ".json");
    save_model(model, path);
    const auto back = load_model(path);
    CHECK(back.kind() == kind);
    CHECK(back.fingerprint == model.fingerprint);
    CHECK(predict(back, fm) == predict(model, fm));
  }
}

TEST_CASE("model file errors") {
  const auto fm = matrix_of(kFour, kStep);
  const auto model = fit(LearnerSpec{}, fm);
  testsupport::TempDir dir;
  save_model(model, dir / "m.json");
  const auto text = testsupport::read_file(dir / "m.json");

  testsupport::write_file(dir / "cut.json", text.substr(0, text.size() / 2));
  CHECK(code_of([&] { load_model(dir / "cut.json"); }) == "CorruptFile");

  auto j = nlohmann::json::parse(text);
  j["version"] = kModelFileVersion + 1;
  testsupport::write_file(dir / "future.json", j.dump());
  CHECK(code_of([&] { load_model(dir / "future.json"); }) == "VersionMismatch");

  auto k = nlohmann::json::parse(text);
  k["payload"] = nlohmann::json::object();
  testsupport::write_file(dir / "empty.json", k.dump());
  CHECK(code_of([&] { load_model(dir / "empty.json"); }) == "CorruptFile");
}

TEST_CASE("predict rejects a different schema") {
  const auto fm = matrix_of(kFour, kStep);
  const auto model = fit(LearnerSpec{}, fm);
  auto other = fm;
  other.schema.numeric_names = {"g0"};
  CHECK(code_of([&] { predict(model, other); }) == "SchemaMismatch");
}

TEST_CASE("parameter validation") {
  TreeParams t;
  t.min_samples_split = 1;
  CHECK(code_of([&] { t.check(); }) == "ConfigError");
  ForestParams f;
  f.n_trees = 0;
  CHECK(code_of([&] { f.check(); }) == "ConfigError");
  GbtParams g;
  g.learning_rate = 0.0;
  CHECK(code_of([&] { g.check(); }) == "ConfigError");
  ElasticNetParams e;
  e.alpha = 1.5;
  CHECK(code_of([&] { e.check(); }) == "ConfigError");
  CHECK(code_of([] { parse_model_kind("svm"); }) == "ConfigError");
  CHECK(code_of([] { fit(LearnerSpec{}, FeatureMatrix{}); }) != "");
}
