#include "petrank/models/model.hpp"

#include <fstream>
#include <sstream>

#include "petrank/error.hpp"
#include "petrank/hash.hpp"

namespace petrank {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

nlohmann::json payload_of(const TrainedModel& m) {
  nlohmann::json payload = std::visit(
      overloaded{
          [](const RegressionTree& t) { return nlohmann::json{{"nodes", to_json(t)}}; },
          [](const RandomForest& f) {
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& t : f.trees) trees.push_back(to_json(t));
            return nlohmann::json{{"trees", trees}};
          },
          [](const GradientBoosted& g) {
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& t : g.trees) trees.push_back(to_json(t));
            return nlohmann::json{
                {"base", g.base}, {"learning_rate", g.learning_rate}, {"trees", trees}};
          },
          [](const LinearModel& l) {
            return nlohmann::json{
                {"coef", std::vector<double>(l.coef.data(), l.coef.data() + l.coef.size())},
                {"intercept", l.intercept}};
          },
      },
      m.state);
  if (m.standardizer) payload["standardizer"] = to_json(*m.standardizer);
  if (m.diagnostics) {
    payload["diagnostics"] = {{"converged", m.diagnostics->converged},
                              {"iterations", m.diagnostics->iterations},
                              {"not_standardized", m.diagnostics->not_standardized}};
  }
  return payload;
}

void stamp(TrainedModel& m, std::size_t n) {
  m.fingerprint.n = n;
  m.fingerprint.seed = m.spec.seed();
  m.fingerprint.config_hash = hex64(fnv1a64(to_json(m.spec).dump()));
  m.fingerprint.state_hash = hex64(fnv1a64(payload_of(m).dump()));
}

}  // namespace

ModelKind parse_model_kind(std::string_view raw) {
  if (raw == "tree") return ModelKind::tree;
  if (raw == "forest") return ModelKind::forest;
  if (raw == "gbt") return ModelKind::gbt;
  if (raw == "ols") return ModelKind::ols;
  if (raw == "elastic_net") return ModelKind::elastic_net;
  throw config_error("learner kind must be tree, forest, gbt, ols or elastic_net, got '" +
                     std::string(raw) + "'");
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::tree:
      return "tree";
    case ModelKind::forest:
      return "forest";
    case ModelKind::gbt:
      return "gbt";
    case ModelKind::ols:
      return "ols";
    default:
      return "elastic_net";
  }
}

std::uint64_t LearnerSpec::seed() const {
  switch (kind) {
    case ModelKind::tree:
      return tree.seed;
    case ModelKind::forest:
      return forest.seed;
    case ModelKind::gbt:
      return gbt.seed;
    default:
      return 0;
  }
}

void LearnerSpec::check() const {
  switch (kind) {
    case ModelKind::tree:
      tree.check();
      break;
    case ModelKind::forest:
      forest.check();
      break;
    case ModelKind::gbt:
      gbt.check();
      break;
    case ModelKind::elastic_net:
      elastic_net.check();
      break;
    default:
      break;
  }
}

nlohmann::ordered_json to_json(const LearnerSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(spec.kind));
  switch (spec.kind) {
    case ModelKind::tree:
      j["params"] = to_json(spec.tree);
      break;
    case ModelKind::forest:
      j["params"] = to_json(spec.forest);
      break;
    case ModelKind::gbt:
      j["params"] = to_json(spec.gbt);
      break;
    case ModelKind::elastic_net:
      j["params"] = to_json(spec.elastic_net);
      break;
    default:
      j["params"] = nlohmann::ordered_json::object();
  }
  j["standardize"] = spec.effective_standardize();
  return j;
}

LearnerSpec learner_from_json(const nlohmann::json& j) {
  LearnerSpec spec;
  try {
    if (j.contains("kind")) spec.kind = parse_model_kind(j["kind"].get<std::string>());
    const nlohmann::json params =
        j.contains("params") ? j["params"] : nlohmann::json::object();
    switch (spec.kind) {
      case ModelKind::tree:
        spec.tree = tree_params_from_json(params);
        break;
      case ModelKind::forest:
        spec.forest = forest_params_from_json(params);
        break;
      case ModelKind::gbt:
        spec.gbt = gbt_params_from_json(params);
        break;
      case ModelKind::elastic_net:
        spec.elastic_net = elastic_net_params_from_json(params);
        break;
      default:
        break;
    }
    if (j.contains("standardize") && !j["standardize"].is_null()) {
      spec.standardize = j["standardize"].get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("learner: ") + e.what());
  }
  spec.check();
  return spec;
}

TrainedModel fit(const LearnerSpec& spec, const FeatureMatrix& x) {
  spec.check();
  x.schema.check();
  if (x.rows() == 0) throw Error("EmptyMatrix", "no training rows");
  if (static_cast<std::size_t>(x.cols()) != x.schema.width() || x.target.size() != x.rows()) {
    throw Error("SchemaInvalid", "matrix shape does not match its schema");
  }

  TrainedModel model;
  model.spec = spec;
  model.schema = x.schema;

  MatrixXd scaled;
  const MatrixXd* design = &x.values;
  if (spec.effective_standardize()) {
    model.standardizer = standardize_fit(x);
    scaled = model.standardizer->transform(x.values);
    design = &scaled;
  }
  switch (spec.kind) {
    case ModelKind::tree:
      model.state = fit_tree(*design, x.target, spec.tree);
      break;
    case ModelKind::forest:
      model.state = fit_forest(*design, x.target, spec.forest);
      break;
    case ModelKind::gbt:
      model.state = fit_gbt(*design, x.target, spec.gbt);
      break;
    case ModelKind::ols:
      model.state = fit_ols(*design, x.target);
      break;
    case ModelKind::elastic_net: {
      auto en = fit_elastic_net(*design, x.target, spec.elastic_net);
      model.state = en.model;
      model.diagnostics = ElasticNetDiagnostics{en.converged, en.iterations, en.not_standardized};
      break;
    }
  }
  stamp(model, static_cast<std::size_t>(x.rows()));
  return model;
}

TrainedModel fit_tree(const FeatureMatrix& x, const TreeParams& params) {
  LearnerSpec spec;
  spec.kind = ModelKind::tree;
  spec.tree = params;
  return fit(spec, x);
}

TrainedModel fit_forest(const FeatureMatrix& x, const ForestParams& params) {
  LearnerSpec spec;
  spec.kind = ModelKind::forest;
  spec.forest = params;
  return fit(spec, x);
}

TrainedModel fit_gbt(const FeatureMatrix& x, const GbtParams& params) {
  LearnerSpec spec;
  spec.kind = ModelKind::gbt;
  spec.gbt = params;
  return fit(spec, x);
}

TrainedModel fit_ols(const FeatureMatrix& x) {
  LearnerSpec spec;
  spec.kind = ModelKind::ols;
  return fit(spec, x);
}

// Expects standardized input; no standardizer is attached here.
TrainedModel fit_elastic_net(const FeatureMatrix& x, const ElasticNetParams& params) {
  LearnerSpec spec;
  spec.kind = ModelKind::elastic_net;
  spec.elastic_net = params;
  spec.standardize = false;
  return fit(spec, x);
}

VectorXd predict(const TrainedModel& model, const FeatureMatrix& x) {
  if (!(x.schema == model.schema) || static_cast<std::size_t>(x.cols()) != model.schema.width()) {
    throw Error("SchemaMismatch", "matrix schema differs from the model's training schema");
  }
  MatrixXd scaled;
  const MatrixXd* design = &x.values;
  if (model.standardizer) {
    scaled = model.standardizer->transform(x.values);
    design = &scaled;
  }
  return std::visit(
      overloaded{
          [&](const RegressionTree& t) { return t.predict(*design); },
          [&](const RandomForest& f) { return f.predict(*design); },
          [&](const GradientBoosted& g) { return g.predict(*design); },
          [&](const LinearModel& l) { return VectorXd(l.predict(*design)); },
      },
      model.state);
}

nlohmann::ordered_json to_json(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["version"] = kModelFileVersion;
  j["kind"] = std::string(to_string(model.kind()));
  j["params"] = to_json(model.spec);
  j["schema"] = to_json(model.schema);
  j["fingerprint"] = {{"n", model.fingerprint.n},
                      {"seed", model.fingerprint.seed},
                      {"config_hash", model.fingerprint.config_hash},
                      {"state_hash", model.fingerprint.state_hash}};
  j["payload"] = payload_of(model);
  return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version")) throw Error("CorruptFile", "missing version");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kModelFileVersion) {
    throw Error("VersionMismatch", "model file version " + j["version"].dump() +
                                       ", expected " + std::to_string(kModelFileVersion));
  }
  TrainedModel m;
  try {
    m.spec = learner_from_json(j.at("params"));
    if (to_string(m.spec.kind) != j.at("kind").get<std::string>()) {
      throw Error("CorruptFile", "kind disagrees with params");
    }
    m.schema = schema_from_json(j.at("schema"));
    const auto& fp = j.at("fingerprint");
    m.fingerprint = {fp.at("n").get<std::size_t>(), fp.at("seed").get<std::uint64_t>(),
                     fp.at("config_hash").get<std::string>(),
                     fp.at("state_hash").get<std::string>()};
    const auto& payload = j.at("payload");
    const auto width = static_cast<Index>(m.schema.width());
    switch (m.spec.kind) {
      case ModelKind::tree: {
        auto t = tree_from_json(payload.at("nodes"));
        t.check_structure(width);
        m.state = std::move(t);
        break;
      }
      case ModelKind::forest: {
        RandomForest f;
        for (const auto& t : payload.at("trees")) {
          f.trees.push_back(tree_from_json(t));
          f.trees.back().check_structure(width);
        }
        if (f.trees.empty()) throw Error("CorruptFile", "forest has no trees");
        m.state = std::move(f);
        break;
      }
      case ModelKind::gbt: {
        GradientBoosted g;
        g.base = payload.at("base").get<double>();
        g.learning_rate = payload.at("learning_rate").get<double>();
        for (const auto& t : payload.at("trees")) {
          g.trees.push_back(tree_from_json(t));
          g.trees.back().check_structure(width);
        }
        m.state = std::move(g);
        break;
      }
      default: {
        LinearModel l;
        const auto coef = payload.at("coef").get<std::vector<double>>();
        if (static_cast<Index>(coef.size()) != width) {
          throw Error("CorruptFile", "coefficient count does not match schema");
        }
        l.coef = Eigen::Map<const VectorXd>(coef.data(), width);
        l.intercept = payload.at("intercept").get<double>();
        m.state = std::move(l);
      }
    }
    if (payload.contains("standardizer")) {
      m.standardizer = standardizer_from_json(payload["standardizer"]);
    }
    if (payload.contains("diagnostics")) {
      const auto& d = payload["diagnostics"];
      m.diagnostics = ElasticNetDiagnostics{d.at("converged").get<bool>(),
                                            d.at("iterations").get<int>(),
                                            d.at("not_standardized").get<bool>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("CorruptFile", e.what());
  } catch (const Error& e) {
    if (e.code() == "CorruptFile") throw;
    throw Error("CorruptFile", e.what());
  }
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  out << to_json(model).dump(1) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IoError", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("CorruptFile", path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace petrank
