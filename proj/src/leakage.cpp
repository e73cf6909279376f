#include "petrank/leakage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "petrank/error.hpp"

namespace petrank {
namespace {

std::vector<std::map<std::string, std::size_t>> bigram_counts(const Corpus& corpus,
                                                              const NormalizationConfig& cfg) {
  std::vector<std::map<std::string, std::size_t>> out;
  out.reserve(corpus.records.size());
  for (const auto& rec : corpus.records) {
    const auto tokens = normalize(tokenize(rec.text), cfg);
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) ++counts[tokens[i] + ' ' + tokens[i + 1]];
    out.push_back(std::move(counts));
  }
  return out;
}

}  // namespace

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& [_, w] : entries) s += w * w;
  return std::sqrt(s);
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

NormalizationConfig leakage_normalization() {
  NormalizationConfig cfg;
  cfg.lowercase = true;
  cfg.strip_non_alphanumeric = true;
  return cfg;
}

TfidfResult tfidf_bigrams(const Corpus& corpus, const NormalizationConfig& cfg) {
  if (corpus.records.empty()) throw Error("EmptyCorpus", "no documents to vectorize");
  cfg.check();
  const auto counts = bigram_counts(corpus, cfg);

  std::map<std::string, std::size_t> df;
  for (const auto& doc : counts) {
    for (const auto& [gram, _] : doc) ++df[gram];
  }

  TfidfResult out;
  out.model.n_documents = counts.size();
  std::map<std::string, std::uint32_t> index;
  const auto n = static_cast<double>(counts.size());
  for (const auto& [gram, d] : df) {
    index.emplace(gram, static_cast<std::uint32_t>(out.model.vocabulary.size()));
    out.model.vocabulary.push_back(gram);
    out.model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  }

  for (std::size_t k = 0; k < counts.size(); ++k) {
    SparseVector v;
    for (const auto& [gram, c] : counts[k]) {
      const auto t = index.at(gram);
      v.entries.emplace_back(t, static_cast<double>(c) * out.model.idf[t]);
    }
    // std::map iteration is lexicographic, which is also vocabulary order.
    const double norm = v.norm();
    for (auto& e : v.entries) e.second /= norm;
    out.names.push_back(corpus.records[k].name);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

LeakageReport cross_split_audit(const Corpus& train, const Corpus& test, double threshold,
                                const NormalizationConfig& cfg) {
  if (train.records.empty() || test.records.empty()) {
    throw Error("EmptyCorpus", "leakage audit needs nonempty train and test splits");
  }
  if (!(threshold > 0.0 && threshold <= 1.0)) throw config_error("threshold must be in (0, 1]");

  Corpus joint;
  joint.records = train.records;
  joint.records.insert(joint.records.end(), test.records.begin(), test.records.end());
  const auto tfidf = tfidf_bigrams(joint, cfg);
  const std::size_t n_train = train.records.size();
  const std::size_t n_test = test.records.size();

  // Inverted index over train vectors; postings hold (train doc, weight).
  std::vector<std::vector<std::pair<std::size_t, double>>> postings(tfidf.model.vocabulary.size());
  for (std::size_t i = 0; i < n_train; ++i) {
    for (const auto& [t, w] : tfidf.vectors[i].entries) postings[t].emplace_back(i, w);
  }

  LeakageReport report;
  report.threshold = threshold;
  report.vocabulary_size = tfidf.model.vocabulary.size();
  report.n_train = n_train;
  report.n_test = n_test;
  report.argmax = {train.records[0].name, test.records[0].name, 0.0};

  // Cosine is taken against the self products rather than assumed unit
  // norms, so a verbatim copy scores exactly 1: both sums then run over the
  // same products in the same order.
  std::vector<double> self(tfidf.vectors.size());
  for (std::size_t k = 0; k < self.size(); ++k) self[k] = dot(tfidf.vectors[k], tfidf.vectors[k]);

  std::vector<double> acc(n_train);
  for (std::size_t j = 0; j < n_test; ++j) {
    std::fill(acc.begin(), acc.end(), 0.0);
    // Terms are visited in increasing order, matching dot().
    for (const auto& [t, w] : tfidf.vectors[n_train + j].entries) {
      for (const auto& [i, wi] : postings[t]) acc[i] += wi * w;
    }
    for (std::size_t i = 0; i < n_train; ++i) {
      const double denom = std::sqrt(self[i] * self[n_train + j]);
      const double s = denom > 0.0 ? std::min(acc[i] / denom, 1.0) : 0.0;
      if (s > report.max_similarity) {
        report.max_similarity = s;
        report.argmax = {train.records[i].name, test.records[j].name, s};
      }
      if (s >= threshold) report.offenders.push_back({train.records[i].name, test.records[j].name, s});
    }
  }
  std::stable_sort(report.offenders.begin(), report.offenders.end(),
                   [](const LeakagePair& a, const LeakagePair& b) {
                     if (a.similarity != b.similarity) return a.similarity > b.similarity;
                     if (a.train_name != b.train_name) return a.train_name < b.train_name;
                     return a.test_name < b.test_name;
                   });
  return report;
}

std::string verdict(const LeakageReport& r) {
  char buf[96];
  if (r.offenders.empty()) {
    std::snprintf(buf, sizeof buf, "PASS (max=%.4f < %.2f)", r.max_similarity, r.threshold);
  } else {
    std::snprintf(buf, sizeof buf, "FAIL (%zu offenders)", r.offenders.size());
  }
  return buf;
}

nlohmann::ordered_json to_json(const LeakageReport& r) {
  auto pair_json = [](const LeakagePair& p) {
    nlohmann::ordered_json j;
    j["train"] = p.train_name;
    j["test"] = p.test_name;
    j["similarity"] = p.similarity;
    return j;
  };
  nlohmann::ordered_json j;
  j["verdict"] = verdict(r);
  j["max_similarity"] = r.max_similarity;
  j["argmax"] = pair_json(r.argmax);
  j["threshold"] = r.threshold;
  j["vocabulary_size"] = r.vocabulary_size;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["offenders"] = nlohmann::ordered_json::array();
  for (const auto& p : r.offenders) j["offenders"].push_back(pair_json(p));
  return j;
}

}  // namespace petrank
