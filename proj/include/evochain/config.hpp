#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "evochain/factorization.hpp"

namespace evochain {

struct EngineConfig {
  // Fixed when the index is built.
  int K = 30;
  RelationWeights weights = kEqualWeights;
  std::uint64_t seed = 0;
  int max_iters = 300;
  double tol = 1e-6;
  int min_doc_freq = 2;
  bool symmetrize_citation = true;
  double restart = 0.15;

  // Per-query defaults.
  double com_t = 0.2;
  int chain_length = 6;
  std::size_t M = 50;
  std::size_t N = 100;
  double r = 0.05;
  std::size_t beam_width = 64;

  // Throws ValidationError naming the first out-of-range field.
  void validate() const;
};

// Parses "w1,w2,w3".
RelationWeights parse_weights(const std::string& text);

}  // namespace evochain
