#pragma once

// Cross-split near-duplicate audit: bigram TF-IDF vectors and exact pairwise
// cosine similarity between train and test documents.
//
// Weighting: tf = raw bigram count, idf = ln((1 + N) / (1 + df)) + 1 over
// the documents passed in, each vector L2-normalized. A document with fewer
// than two tokens has an empty vector and similarity 0 to everything.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "petrank/corpus.hpp"
#include "petrank/textstats.hpp"

namespace petrank {

// (term index, weight) pairs sorted by term index; weights positive.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  double norm() const;
};

// Dot product accumulated in increasing term order, so cosine(a, b) and
// cosine(b, a) are bitwise equal.
double dot(const SparseVector& a, const SparseVector& b);

struct TfidfModel {
  std::vector<std::string> vocabulary;  // "w1 w2", sorted
  std::vector<double> idf;
  std::size_t n_documents = 0;
};

struct TfidfResult {
  TfidfModel model;
  std::vector<std::string> names;  // parallel to vectors, in corpus order
  std::vector<SparseVector> vectors;
};

// Lowercase and punctuation stripping on, stopwords kept, no stemming.
NormalizationConfig leakage_normalization();

// Errors: EmptyCorpus.
TfidfResult tfidf_bigrams(const Corpus& corpus, const NormalizationConfig& cfg);

struct LeakagePair {
  std::string train_name;
  std::string test_name;
  double similarity = 0.0;
};

struct LeakageReport {
  double max_similarity = 0.0;
  LeakagePair argmax;
  std::vector<LeakagePair> offenders;  // similarity >= threshold, descending
  double threshold = 0.8;
  std::size_t vocabulary_size = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

// Vocabulary and IDF are fitted on train and test together; every
// (train, test) pair is scored. Errors: EmptyCorpus, ConfigError (threshold).
LeakageReport cross_split_audit(const Corpus& train, const Corpus& test, double threshold,
                                const NormalizationConfig& cfg);

// "PASS (max=0.7650 < 0.80)" or "FAIL (k offenders)".
std::string verdict(const LeakageReport& r);

nlohmann::ordered_json to_json(const LeakageReport& r);

}  // namespace petrank
