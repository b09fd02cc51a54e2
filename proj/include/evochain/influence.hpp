#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evochain/corpus.hpp"

namespace evochain {

// Paper/word bipartite graph with edge weights taken from the TF-IDF content
// relation: paper -> word rows normalized over words, word -> paper rows
// normalized over papers.
struct BipartiteWalkGraph {
  SparseMatrix paper_to_word;  // P x W, row-stochastic on nonempty rows
  SparseMatrix word_to_paper;  // W x P, row-stochastic on nonempty rows
  std::vector<bool> dangling;  // papers with an empty text row
  double restart = 0.15;

  std::size_t num_papers() const { return static_cast<std::size_t>(paper_to_word.rows()); }
  std::size_t num_words() const { return static_cast<std::size_t>(paper_to_word.cols()); }
};

BipartiteWalkGraph build_walk_graph(const SparseMatrix& content, double restart);

struct WalkOptions {
  double tol = 1e-12;  // L1 change between successive iterates
  int max_iters = 10000;
};

// Fixed point of the restart walk over all P + W nodes (papers first):
//   x = restart * e_start + (1 - restart) * (one bipartite step of x).
// A dangling paper sends its walk mass back to `start`. A blocked word keeps
// its incoming mass but has no way out, so that mass is lost.
std::vector<double> walk_state(const BipartiteWalkGraph& g, std::size_t start,
                               std::optional<std::size_t> blocked_word = std::nullopt,
                               const WalkOptions& opts = {});

// Paper-node visit distribution p(. | start), normalized over papers. With a
// blocked word the result is p_{-w}(. | start): the blocked walk divided by
// the normalizer of the unblocked walk, so it never exceeds p(. | start).
std::vector<double> visit_probabilities(const BipartiteWalkGraph& g, std::size_t start,
                                        std::optional<std::size_t> blocked_word = std::nullopt,
                                        const WalkOptions& opts = {});

struct InfluenceProfile {
  std::size_t source = 0;
  std::size_t target = 0;
  std::size_t dimension = 0;  // vocabulary size
  std::vector<std::pair<std::size_t, double>> per_word;  // sorted by word, nonzero entries only

  double at(std::size_t word) const;
  std::vector<double> dense() const;
};

// influence(source, target | w) = p(target | source) - p_{-w}(target | source).
// Thread-safe; every intermediate solve and finished profile is memoized.
class InfluenceCalculator {
 public:
  explicit InfluenceCalculator(const BipartiteWalkGraph& graph, WalkOptions opts = {});

  std::shared_ptr<const InfluenceProfile> profile(std::size_t source, std::size_t target) const;
  const BipartiteWalkGraph& graph() const { return graph_; }

 private:
  using Vec = std::shared_ptr<const std::vector<double>>;

  Vec forward_solve(std::size_t source) const;   // (I - bT)^{-1} e_source
  Vec adjoint_solve(std::size_t node) const;     // (I - bT)^{-T} e_node
  Vec dangling_adjoint() const;                  // (I - bT)^{-T} d
  double self_gain(std::size_t word) const;      // b [(I - bT)^{-1} t_w]_w
  std::vector<double> solve(std::span<const double> rhs, bool adjoint) const;
  double word_out(std::span<const double> y, std::size_t word) const;

  const BipartiteWalkGraph& graph_;
  WalkOptions opts_;

  mutable std::mutex mutex_;
  mutable std::unordered_map<std::size_t, Vec> forward_;
  mutable std::unordered_map<std::size_t, Vec> adjoint_;
  mutable Vec dangling_;
  mutable std::unordered_map<std::size_t, double> self_gain_;
  mutable std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const InfluenceProfile>> profiles_;
};

// Reference route: one blocked walk per word visited from `source`.
InfluenceProfile word_influence_vector(const BipartiteWalkGraph& g, std::size_t source, std::size_t target,
                                       const WalkOptions& opts = {});

// sum_n topic[n] * influence(w_n). `topic` must be a distribution over the vocabulary.
double topic_similarity(const InfluenceProfile& profile, std::span<const double> topic);

}  // namespace evochain
