#include "evochain/coherence.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "evochain/errors.hpp"

namespace evochain {

void validate_chain(const Corpus& corpus, const Chain& chain) {
  if (chain.size() < 2) throw ValidationError("a chain needs at least two papers");
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto p = chain.papers[k];
    if (p >= corpus.size()) throw LookupError("chain paper index out of range");
    if (!seen.insert(p).second) throw ValidationError("chain repeats paper " + corpus.paper(p).id);
    if (k > 0 && !corpus.precedes(chain.papers[k - 1], p))
      throw ValidationError("chain is not chronological at " + corpus.paper(p).id);
  }
}

CoherenceResult coherence_evolving_topic(const std::vector<ProfileRef>& links, double r,
                                         const MaximinOptions& opts) {
  if (links.empty()) throw ValidationError("a chain needs at least one link");
  if (!(r >= 0.0)) throw ValidationError("smoothness r must be nonnegative");
  const std::size_t dim = links.front()->dimension;
  std::set<std::size_t> words;
  for (const auto& l : links) {
    if (l->dimension != dim) throw ValidationError("influence profiles over different vocabularies");
    for (auto [w, x] : l->per_word)
      if (x > 0.0) words.insert(w);
  }

  CoherenceResult res;
  res.topics.smoothness = r;
  res.active_words.assign(words.begin(), words.end());
  if (res.active_words.empty()) {
    res.topics.topics.assign(links.size(), std::vector<double>(dim, dim ? 1.0 / static_cast<double>(dim) : 0.0));
    return res;
  }

  const std::size_t d = res.active_words.size();
  std::vector<std::vector<double>> vectors(links.size(), std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < links.size(); ++j) {
    const auto& pw = links[j]->per_word;
    std::size_t k = 0;
    for (auto [w, x] : pw) {
      while (k < d && res.active_words[k] < w) ++k;
      if (k < d && res.active_words[k] == w) vectors[j][k] = x;
    }
  }
  auto sol = solve_maximin_lp(vectors, r, opts);
  res.score = sol.score;
  res.topics.topics.assign(links.size(), std::vector<double>(dim, 0.0));
  for (std::size_t j = 0; j < links.size(); ++j)
    for (std::size_t k = 0; k < d; ++k) res.topics.topics[j][res.active_words[k]] = sol.weights[j][k];
  return res;
}

CoherenceResult coherence_fixed_topic(const std::vector<ProfileRef>& links, const MaximinOptions& opts) {
  return coherence_evolving_topic(links, 0.0, opts);
}

}  // namespace evochain
