#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evochain/coherence.hpp"
#include "evochain/config.hpp"
#include "evochain/corpus.hpp"
#include "evochain/factorization.hpp"
#include "evochain/influence.hpp"

namespace evochain {

enum class QueryKind { Keyword, SinglePaper, TwoPaper };

const char* to_string(QueryKind kind);
QueryKind parse_query_kind(const std::string& text);

struct QuerySpec {
  QueryKind kind = QueryKind::SinglePaper;
  std::optional<std::string> keyword;
  std::optional<std::string> paper_a;
  std::optional<std::string> paper_b;
  // Overrides of the engine's per-query defaults.
  std::optional<int> chain_length;
  std::optional<double> com_t;
  std::optional<double> r;
  std::optional<std::size_t> M;
  std::optional<std::size_t> N;
  std::optional<std::size_t> beam_width;
};

// Soft community membership of every paper under a threshold.
class CommunityIndex {
 public:
  CommunityIndex(const MetaFacModel& model, double com_t);

  double com_t() const { return com_t_; }
  int num_communities() const { return static_cast<int>(members_.size()); }
  // Empty for papers whose factor row carries no community signal.
  const std::set<int>& communities_of(std::size_t paper) const { return membership_.at(paper); }
  const std::vector<std::size_t>& members(int community) const { return members_.at(static_cast<std::size_t>(community)); }
  bool contains(int community, std::size_t paper) const { return membership_.at(paper).contains(community); }

 private:
  double com_t_;
  std::vector<std::set<int>> membership_;
  std::vector<std::vector<std::size_t>> members_;
};

struct CandidatePool {
  int community = 0;
  std::vector<std::pair<std::size_t, double>> papers;  // (paper, relevance), relevance non-increasing
  std::string source;
};

// sum_k p_k U1(p, k) U1(m, k)
double relevance_single(const MetaFacModel& model, std::size_t p, std::size_t m);
// sum_k p_k U1(m, k) U1(ps, k) U1(pt, k)
double relevance_pair(const MetaFacModel& model, std::size_t ps, std::size_t pt, std::size_t m);

// Top M members of `community` by relevance to p; p is always kept.
CandidatePool candidate_pool_single(const Corpus& corpus, const MetaFacModel& model, const CommunityIndex& index,
                                    std::size_t p, int community, std::size_t M, std::size_t min_size);

// Members strictly between ps and pt in chronological order, top M by
// relevance to both, plus the two endpoints.
CandidatePool candidate_pool_pair(const Corpus& corpus, const MetaFacModel& model, const CommunityIndex& index,
                                  std::size_t ps, std::size_t pt, int community, std::size_t M);

struct KeywordPools {
  std::vector<CandidatePool> pools;  // ordered by community id
  std::vector<std::string> dropped;  // human-readable notes for pools below min_size
};

// TF-IDF relevance of the N best papers, grouped by soft community membership.
KeywordPools candidate_pool_keyword(const Corpus& corpus, const Vocabulary& vocab, const StopWords& stopwords,
                                    const SparseMatrix& content, const CommunityIndex& index,
                                    const std::string& keyword, std::size_t N, std::size_t min_size);

struct ChainConstraint {
  QueryKind kind = QueryKind::Keyword;
  std::optional<std::size_t> anchor;  // single paper: must be on the chain; two papers: first paper
  std::optional<std::size_t> target;  // two papers: last paper
};

struct SearchMode {
  enum class Kind { Exhaustive, Beam };
  Kind kind = Kind::Beam;
  std::size_t beam_width = 64;

  static SearchMode exhaustive() { return {Kind::Exhaustive, 0}; }
  static SearchMode beam(std::size_t width) { return {Kind::Beam, width}; }
};

struct ChainResult {
  Chain chain;
  CoherenceResult coherence;
};

// Most coherent chronological chain of `length` papers from the pool that
// satisfies the constraint. Ties go to the lexicographically smallest
// sequence of paper ids.
ChainResult best_chain(const Corpus& corpus, const CandidatePool& pool, const ChainConstraint& constraint,
                       std::size_t length, double r, const InfluenceCalculator& influence, SearchMode mode);

}  // namespace evochain
