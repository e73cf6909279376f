// petrank: command-line driver for the petition ranking pipeline.
//
//   petrank <command> --config cfg.json [--out-dir DIR] [overrides...]
//   petrank run --config cfg.json          all commands in order
//   petrank synth --out corpus.csv [--n N] [--seed S] ...

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "petrank/pipeline.hpp"
#include "petrank/synth.hpp"

namespace {

using petrank::Error;

// Flags that override config file values, applied as a JSON merge patch.
struct Overrides {
  std::optional<std::string> corpus, format, target, embeddings, model, feature_subsample,
      dev_policy, fit_scope, out_dir;
  std::optional<std::uint64_t> seed, eval_seed;
  std::optional<int> n_trees, max_depth;
  std::optional<std::size_t> k, mccv_iterations, bootstrap;
  std::optional<double> rel_tol, threshold;
  bool exclude_gap = false;
  bool avg_word_length = false;

  void attach(CLI::App* app) {
    app->add_option("--corpus", corpus, "Corpus file");
    app->add_option("--format", format, "Corpus format: csv or jsonl");
    app->add_option("--target", target, "inverse_square or log");
    app->add_flag("--exclude-gap-features", exclude_gap, "Use only text statistics as numeric features");
    app->add_flag("--include-avg-word-length", avg_word_length, "Add avg_word_length to the numeric block");
    app->add_option("--embeddings", embeddings, "Embedding file");
    app->add_option("--model", model, "tree, forest, gbt, ols or elastic_net");
    app->add_option("--seed", seed, "Learner seed");
    app->add_option("--n-trees", n_trees, "Forest size");
    app->add_option("--max-depth", max_depth, "Tree depth limit (tree, forest, gbt)");
    app->add_option("--feature-subsample", feature_subsample, "all, third or sqrt (tree, forest)");
    app->add_option("--dev-policy", dev_policy, "reserve or merge");
    app->add_option("--fit-scope", fit_scope, "train or all");
    app->add_option("--eval-seed", eval_seed, "Seed for CV splits and bootstrap");
    app->add_option("--k", k, "K-fold folds");
    app->add_option("--mccv-iterations", mccv_iterations, "Monte Carlo CV iterations");
    app->add_option("--bootstrap", bootstrap, "Bootstrap resamples (0 disables)");
    app->add_option("--rel-tol", rel_tol, "Relative tolerance for tolerance accuracy");
    app->add_option("--threshold", threshold, "Leakage similarity threshold");
    app->add_option("--out-dir", out_dir, "Output directory");
  }

  nlohmann::json patch(const nlohmann::json& base) const {
    nlohmann::json p = nlohmann::json::object();
    if (corpus) p["corpus"]["path"] = *corpus;
    if (format) p["corpus"]["format"] = *format;
    if (target) p["features"]["target"] = *target;
    if (exclude_gap) p["features"]["exclude_gap_features"] = true;
    if (avg_word_length) p["features"]["include_avg_word_length"] = true;
    if (embeddings) p["features"]["embeddings_path"] = *embeddings;
    if (dev_policy) p["splits"]["dev_policy"] = *dev_policy;
    if (fit_scope) p["splits"]["fit_scope"] = *fit_scope;
    if (eval_seed) p["eval"]["seed"] = *eval_seed;
    if (k) p["eval"]["kfold_k"] = *k;
    if (mccv_iterations) p["eval"]["mccv_iterations"] = *mccv_iterations;
    if (bootstrap) p["eval"]["bootstrap_resamples"] = *bootstrap;
    if (rel_tol) p["eval"]["rel_tol"] = *rel_tol;
    if (threshold) p["leakage"]["threshold"] = *threshold;
    if (out_dir) p["out_dir"] = *out_dir;

    // Learner parameters live under the kind they belong to.
    const std::string base_kind =
        base.contains("learner") ? base["learner"].value("kind", "forest") : "forest";
    const std::string kind = model.value_or(base_kind);
    nlohmann::json params = nlohmann::json::object();
    if (seed) params["seed"] = *seed;
    if (n_trees) params["n_trees"] = *n_trees;
    auto& tree = kind == "forest" ? params["tree"] : params;
    if (max_depth) tree["max_depth"] = *max_depth;
    if (feature_subsample) tree["feature_subsample"] = *feature_subsample;
    if (params.contains("tree") && params["tree"].is_null()) params.erase("tree");
    if (model) p["learner"]["kind"] = kind;
    if (!params.empty()) p["learner"]["params"] = params;
    return p;
  }
};

petrank::PipelineConfig resolve_config(const std::optional<std::string>& path,
                                       const Overrides& o) {
  nlohmann::json base = nlohmann::json::object();
  if (path) {
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw petrank::config_error("config file '" + *path + "' does not exist");
    try {
      base = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw petrank::config_error("config file '" + *path + "': " + e.what());
    }
  }
  base.merge_patch(o.patch(base));
  return petrank::config_from_json(base);
}

int run_synth(const std::string& out, const petrank::SynthConfig& cfg) {
  const auto synth = petrank::synthesize_corpus(cfg);
  petrank::write_corpus_csv(synth.corpus, out);
  std::cout << "synth: wrote " << synth.corpus.records.size() << " petitions to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Urgency ranking for legal petitions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", petrank::kVersion);

  std::optional<std::string> config_path;
  Overrides overrides;
  std::vector<std::pair<CLI::App*, std::optional<petrank::Command>>> pipeline_cmds;
  const std::map<std::string, std::string> help = {
      {"ingest", "Load and validate the corpus"},
      {"chronology", "Extract acceptance and hearing dates"},
      {"features", "Assemble the feature matrix"},
      {"train", "Fit the configured learner"},
      {"evaluate", "Score the model on the test split"},
      {"cv", "K-fold and Monte Carlo cross-validation"},
      {"rank", "Rank petitions by predicted urgency"},
      {"leakage", "Audit train/test near-duplicates"}};
  for (auto c : petrank::all_commands()) {
    const std::string name(petrank::to_string(c));
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "Pipeline config (JSON)");
    overrides.attach(sub);
    pipeline_cmds.emplace_back(sub, c);
  }
  auto* run = app.add_subcommand("run", "Run every pipeline command in order");
  run->add_option("--config", config_path, "Pipeline config (JSON)");
  overrides.attach(run);
  pipeline_cmds.emplace_back(run, std::nullopt);

  petrank::SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with known gaps");
  synth->add_option("--out", synth_out, "Output CSV path")->required();
  synth->add_option("--n", synth_cfg.n_accepted, "Accepted petitions");
  synth->add_option("--rejected", synth_cfg.n_rejected, "Rejected petitions");
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");
  synth->add_option("--max-gap", synth_cfg.max_gap, "Largest gap in days");
  synth->add_option("--test-fraction", synth_cfg.test_fraction, "Share of rows in the test split");
  synth->add_option("--dev-fraction", synth_cfg.dev_fraction, "Share of rows in the dev split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_out, synth_cfg);
    for (const auto& [sub, cmd] : pipeline_cmds) {
      if (!sub->parsed()) continue;
      const auto cfg = resolve_config(config_path, overrides);
      return cmd ? petrank::run_command(*cmd, cfg, std::cout) : petrank::run_all(cfg, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return petrank::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
