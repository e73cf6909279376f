#pragma once

// Synthetic petition corpora with known acceptance and hearing dates.
//
// Each accepted petition carries one anchored filing date, a block of
// keyword-free boilerplate longer than the anchor window, and one anchored
// hearing date. Unanchored decoy dates appear in the caption and in a
// closing line. gap_days is log-uniform over [1, max_gap]:
// floor(exp(u * ln(max_gap + 1))) with u uniform on [0, 1).

#include <cstdint>
#include <map>
#include <string>

#include "petrank/corpus.hpp"

namespace petrank {

struct SynthConfig {
  std::size_t n_accepted = 1000;
  std::size_t n_rejected = 0;
  std::uint64_t seed = 1;
  int max_gap = 400;
  double test_fraction = 0.2;
  double dev_fraction = 0.0;

  void check() const;  // throws ConfigError
};

struct SynthCorpus {
  Corpus corpus;
  std::map<std::string, int> gap_days;  // accepted petitions only
};

SynthCorpus synthesize_corpus(const SynthConfig& cfg);

}  // namespace petrank
