#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "evochain/corpus.hpp"
#include "evochain/influence.hpp"
#include "evochain/lp.hpp"

namespace evochain {

// Papers by corpus index, in (year, id) order, no repeats, at least two.
struct Chain {
  std::vector<std::size_t> papers;

  std::size_t size() const { return papers.size(); }
  std::size_t links() const { return papers.empty() ? 0 : papers.size() - 1; }
  bool operator==(const Chain&) const = default;
};

// Throws ValidationError when the chain is too short, repeats a paper or is
// out of chronological order.
void validate_chain(const Corpus& corpus, const Chain& chain);

struct TopicSequence {
  std::vector<std::vector<double>> topics;  // one word distribution per link, full vocabulary
  double smoothness = 0.0;
};

struct CoherenceResult {
  double score = 0.0;
  TopicSequence topics;
  std::vector<std::size_t> active_words;
};

using ProfileRef = std::shared_ptr<const InfluenceProfile>;

// Smoothly evolving topics: one topic per link, consecutive topics within r
// of each other word by word. The program runs over the words that carry
// influence on at least one link.
CoherenceResult coherence_evolving_topic(const std::vector<ProfileRef>& links, double r,
                                         const MaximinOptions& opts = {});

// A single topic shared by every link (r = 0).
CoherenceResult coherence_fixed_topic(const std::vector<ProfileRef>& links, const MaximinOptions& opts = {});

}  // namespace evochain
