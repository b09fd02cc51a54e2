#include "evochain/chains.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "evochain/errors.hpp"

namespace evochain {

const char* to_string(QueryKind kind) {
  switch (kind) {
    case QueryKind::Keyword: return "keyword";
    case QueryKind::SinglePaper: return "single_paper";
    case QueryKind::TwoPaper: return "two_paper";
  }
  return "?";
}

QueryKind parse_query_kind(const std::string& text) {
  if (text == "keyword") return QueryKind::Keyword;
  if (text == "single_paper") return QueryKind::SinglePaper;
  if (text == "two_paper") return QueryKind::TwoPaper;
  throw ValidationError("unknown query kind '" + text + "'");
}

CommunityIndex::CommunityIndex(const MetaFacModel& model, double com_t)
    : com_t_(com_t), membership_(static_cast<std::size_t>(model.U1.rows())), members_(static_cast<std::size_t>(model.K)) {
  if (!(com_t > 0.0 && com_t <= 1.0)) throw ValidationError("com_t must lie in (0, 1]");
  for (std::size_t p = 0; p < membership_.size(); ++p) {
    if (!(model.U1.row(static_cast<Eigen::Index>(p)).dot(model.core) > 0.0)) continue;
    membership_[p] = assign_communities(topic_distribution(model, static_cast<Eigen::Index>(p)), com_t);
    for (int k : membership_[p]) members_[static_cast<std::size_t>(k)].push_back(p);
  }
}

double relevance_single(const MetaFacModel& model, std::size_t p, std::size_t m) {
  double s = 0.0;
  for (int k = 0; k < model.K; ++k)
    s += model.core[k] * model.U1(static_cast<Eigen::Index>(p), k) * model.U1(static_cast<Eigen::Index>(m), k);
  return s;
}

double relevance_pair(const MetaFacModel& model, std::size_t ps, std::size_t pt, std::size_t m) {
  double s = 0.0;
  for (int k = 0; k < model.K; ++k)
    s += model.core[k] * model.U1(static_cast<Eigen::Index>(m), k) * model.U1(static_cast<Eigen::Index>(ps), k) *
         model.U1(static_cast<Eigen::Index>(pt), k);
  return s;
}

namespace {

// Relevance descending, then paper id ascending.
void sort_by_relevance(const Corpus& corpus, std::vector<std::pair<std::size_t, double>>& v) {
  std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return corpus.paper(a.first).id < corpus.paper(b.first).id;
  });
}

void check_community(const CommunityIndex& index, int community) {
  if (community < 0 || community >= index.num_communities())
    throw LookupError("community " + std::to_string(community) + " out of range");
}

}  // namespace

CandidatePool candidate_pool_single(const Corpus& corpus, const MetaFacModel& model, const CommunityIndex& index,
                                    std::size_t p, int community, std::size_t M, std::size_t min_size) {
  check_community(index, community);
  if (!index.contains(community, p))
    throw ValidationError("paper " + corpus.paper(p).id + " is not in community " + std::to_string(community));
  const auto& members = index.members(community);
  if (members.size() < min_size)
    throw ValidationError("community too small: community " + std::to_string(community) + " has " +
                          std::to_string(members.size()) + " papers");

  CandidatePool pool;
  pool.community = community;
  pool.source = "single_paper:" + corpus.paper(p).id;
  for (auto m : members) pool.papers.emplace_back(m, relevance_single(model, p, m));
  sort_by_relevance(corpus, pool.papers);
  if (pool.papers.size() > M) {
    auto self = std::find_if(pool.papers.begin(), pool.papers.end(), [&](const auto& e) { return e.first == p; });
    const auto self_entry = *self;
    const bool kept = static_cast<std::size_t>(self - pool.papers.begin()) < M;
    pool.papers.resize(M);
    if (!kept) pool.papers.back() = self_entry;
  }
  return pool;
}

CandidatePool candidate_pool_pair(const Corpus& corpus, const MetaFacModel& model, const CommunityIndex& index,
                                  std::size_t ps, std::size_t pt, int community, std::size_t M) {
  check_community(index, community);
  if (ps == pt) throw ValidationError("distinct papers required");
  if (!index.contains(community, ps) || !index.contains(community, pt)) throw QueryError("papers share no community");
  if (!corpus.precedes(ps, pt)) throw ValidationError("the first paper must precede the second");

  CandidatePool pool;
  pool.community = community;
  pool.source = "two_paper:" + corpus.paper(ps).id + "," + corpus.paper(pt).id;
  std::vector<std::pair<std::size_t, double>> inner;
  for (auto m : index.members(community))
    if (corpus.precedes(ps, m) && corpus.precedes(m, pt)) inner.emplace_back(m, relevance_pair(model, ps, pt, m));
  sort_by_relevance(corpus, inner);
  if (inner.size() > M) inner.resize(M);
  inner.emplace_back(ps, relevance_pair(model, ps, pt, ps));
  inner.emplace_back(pt, relevance_pair(model, ps, pt, pt));
  sort_by_relevance(corpus, inner);
  pool.papers = std::move(inner);
  return pool;
}

KeywordPools candidate_pool_keyword(const Corpus& corpus, const Vocabulary& vocab, const StopWords& stopwords,
                                    const SparseMatrix& content, const CommunityIndex& index,
                                    const std::string& keyword, std::size_t N, std::size_t min_size) {
  std::set<std::size_t> stems;
  for (const auto& s : analyze(keyword, stopwords))
    if (auto w = vocab.find(s)) stems.insert(*w);
  if (stems.empty()) throw QueryError("unknown keyword: " + keyword);

  std::vector<std::pair<std::size_t, double>> scored;
  for (Eigen::Index p = 0; p < content.outerSize(); ++p) {
    double rel = 0.0;
    for (SparseMatrix::InnerIterator it(content, p); it; ++it)
      if (stems.contains(static_cast<std::size_t>(it.col()))) rel += it.value();
    if (rel > 0.0) scored.emplace_back(static_cast<std::size_t>(p), rel);
  }
  sort_by_relevance(corpus, scored);
  if (scored.size() > N) scored.resize(N);

  std::map<int, CandidatePool> groups;
  for (const auto& entry : scored) {
    for (int k : index.communities_of(entry.first)) {
      auto& pool = groups[k];
      pool.community = k;
      pool.source = "keyword:" + keyword;
      pool.papers.push_back(entry);
    }
  }
  KeywordPools out;
  for (auto& [k, pool] : groups) {
    if (pool.papers.size() < min_size) {
      out.dropped.push_back("community " + std::to_string(k) + ": " + std::to_string(pool.papers.size()) +
                            " relevant papers, fewer than the chain length");
      continue;
    }
    out.pools.push_back(std::move(pool));
  }
  return out;
}

namespace {

struct Partial {
  std::vector<std::size_t> pos;  // indices into the chronological candidate list
  double score = std::numeric_limits<double>::infinity();
};

class ChainSearch {
 public:
  ChainSearch(const Corpus& corpus, const CandidatePool& pool, const ChainConstraint& constraint, std::size_t length,
              double r, const InfluenceCalculator& influence)
      : corpus_(corpus), length_(length), r_(r), influence_(influence) {
    if (length < 2) throw ValidationError("chain length must be at least 2");
    for (const auto& e : pool.papers) cands_.push_back(e.first);
    std::sort(cands_.begin(), cands_.end(), [&](auto a, auto b) { return corpus.precedes(a, b); });
    cands_.erase(std::unique(cands_.begin(), cands_.end()), cands_.end());
    if (cands_.size() < length)
      throw ValidationError("community too small: pool has " + std::to_string(cands_.size()) + " papers");

    kind_ = constraint.kind;
    auto locate = [&](std::optional<std::size_t> paper, const char* what) {
      if (!paper) throw ValidationError(std::string("constraint is missing the ") + what);
      auto it = std::find(cands_.begin(), cands_.end(), *paper);
      if (it == cands_.end())
        throw ValidationError(std::string("the ") + what + " is not in the candidate pool");
      return static_cast<std::size_t>(it - cands_.begin());
    };
    if (kind_ == QueryKind::SinglePaper) anchor_ = locate(constraint.anchor, "query paper");
    if (kind_ == QueryKind::TwoPaper) {
      anchor_ = locate(constraint.anchor, "first paper");
      target_ = locate(constraint.target, "last paper");
      if (anchor_ >= target_) throw ValidationError("the first paper must precede the last paper");
    }
  }

  std::vector<Partial> starts() const {
    std::vector<Partial> out;
    if (kind_ == QueryKind::TwoPaper) {
      out.push_back({{anchor_}});
      return out;
    }
    for (std::size_t j = 0; j < cands_.size(); ++j) {
      Partial p{{j}};
      if (viable(p)) out.push_back(std::move(p));
    }
    return out;
  }

  // Whether `p` (already extended) can still be completed to a valid chain.
  bool viable(const Partial& p) const {
    const std::size_t last = p.pos.back();
    const std::size_t remaining = length_ - p.pos.size();
    if (cands_.size() - 1 - last < remaining) return false;
    switch (kind_) {
      case QueryKind::Keyword:
        return true;
      case QueryKind::SinglePaper: {
        const bool has = std::find(p.pos.begin(), p.pos.end(), anchor_) != p.pos.end();
        return has || (last < anchor_ && remaining >= 1);
      }
      case QueryKind::TwoPaper:
        if (remaining == 0) return last == target_;
        return last < target_ && target_ - last >= remaining;
    }
    return false;
  }

  std::vector<ProfileRef> links(const std::vector<std::size_t>& pos) const {
    std::vector<ProfileRef> out;
    for (std::size_t k = 0; k + 1 < pos.size(); ++k) out.push_back(influence_.profile(cands_[pos[k]], cands_[pos[k + 1]]));
    return out;
  }

  double score(const std::vector<std::size_t>& pos) const {
    return coherence_evolving_topic(links(pos), r_).score;
  }

  double best_link(std::size_t from, std::size_t to) const {
    double m = 0.0;
    for (auto [w, x] : influence_.profile(cands_[from], cands_[to])->per_word) m = std::max(m, x);
    return m;
  }

  // Higher score first, then lexicographically smaller id sequence.
  bool better(const Partial& a, const Partial& b) const {
    if (a.score != b.score) return a.score > b.score;
    return std::lexicographical_compare(a.pos.begin(), a.pos.end(), b.pos.begin(), b.pos.end(),
                                        [&](auto x, auto y) { return id(x) < id(y); });
  }

  Partial exhaustive() const {
    std::optional<Partial> best;
    std::vector<Partial> stack = starts();
    std::reverse(stack.begin(), stack.end());
    while (!stack.empty()) {
      Partial p = std::move(stack.back());
      stack.pop_back();
      if (p.pos.size() == length_) {
        p.score = score(p.pos);
        if (!best || better(p, *best)) best = std::move(p);
        continue;
      }
      for (std::size_t j = cands_.size(); j-- > p.pos.back() + 1;) {
        Partial q = p;
        q.pos.push_back(j);
        if (viable(q)) stack.push_back(std::move(q));
      }
    }
    if (!best) throw QueryError("no valid chain of length " + std::to_string(length_));
    return *best;
  }

  // Extensions are visited in order of an upper bound on their coherence
  // (prefix score and the new link's best word), so the kept set matches an
  // evaluation of every extension.
  Partial beam(std::size_t width) const {
    std::vector<Partial> level = starts();
    for (std::size_t len = 1; len < length_ && !level.empty(); ++len) {
      struct Extension {
        double bound;
        std::size_t parent;
        std::size_t next;
      };
      std::vector<Extension> ext;
      for (std::size_t i = 0; i < level.size(); ++i) {
        const auto& p = level[i];
        for (std::size_t j = p.pos.back() + 1; j < cands_.size(); ++j) {
          Partial q{p.pos};
          q.pos.push_back(j);
          if (!viable(q)) continue;
          ext.push_back({std::min(p.score, best_link(p.pos.back(), j)), i, j});
        }
      }
      std::stable_sort(ext.begin(), ext.end(), [](const auto& a, const auto& b) { return a.bound > b.bound; });

      std::vector<Partial> kept;
      for (const auto& e : ext) {
        if (kept.size() >= width && e.bound < kept.back().score) break;
        Partial q{level[e.parent].pos};
        q.pos.push_back(e.next);
        q.score = q.pos.size() == 2 ? e.bound : score(q.pos);
        if (kept.size() >= width && !better(q, kept.back())) continue;
        auto at = std::upper_bound(kept.begin(), kept.end(), q, [&](const auto& a, const auto& b) { return better(a, b); });
        kept.insert(at, std::move(q));
        if (kept.size() > width) kept.pop_back();
      }
      level = std::move(kept);
    }
    if (level.empty() || level.front().pos.size() != length_)
      throw QueryError("no valid chain of length " + std::to_string(length_));
    return level.front();
  }

  ChainResult finish(const Partial& p) const {
    ChainResult res;
    for (auto k : p.pos) res.chain.papers.push_back(cands_[k]);
    res.coherence = coherence_evolving_topic(links(p.pos), r_);
    return res;
  }

 private:
  const std::string& id(std::size_t pos) const { return corpus_.paper(cands_[pos]).id; }

  const Corpus& corpus_;
  std::size_t length_;
  double r_;
  const InfluenceCalculator& influence_;
  std::vector<std::size_t> cands_;
  QueryKind kind_ = QueryKind::Keyword;
  std::size_t anchor_ = 0;
  std::size_t target_ = 0;
};

}  // namespace

ChainResult best_chain(const Corpus& corpus, const CandidatePool& pool, const ChainConstraint& constraint,
                       std::size_t length, double r, const InfluenceCalculator& influence, SearchMode mode) {
  ChainSearch search(corpus, pool, constraint, length, r, influence);
  if (mode.kind == SearchMode::Kind::Exhaustive) return search.finish(search.exhaustive());
  if (mode.beam_width < 1) throw ValidationError("beam width must be positive");
  return search.finish(search.beam(mode.beam_width));
}

}  // namespace evochain
