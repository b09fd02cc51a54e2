#pragma once

#include <cstdint>
#include <vector>

#include "evochain/corpus.hpp"

namespace evochain {

// Planted-community corpus: papers, words and authors are split into blocks;
// a paper uses a word, has an author or cites an earlier paper with
// probability `p_in` inside its block and `p_out` across blocks.
struct PlantedCorpusSpec {
  int papers = 300;
  int communities = 3;
  int words = 200;
  int authors = 60;
  double p_in = 0.2;
  double p_out = 0.01;
  int first_year = 1990;
  int last_year = 2019;
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  Corpus corpus;
  std::vector<int> labels;  // planted block of each paper, in corpus order
};

PlantedCorpus make_planted_corpus(const PlantedCorpusSpec& spec);

}  // namespace evochain
