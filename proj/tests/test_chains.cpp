#include <numeric>
#include <random>

#include "doctest.h"
#include "evochain/chains.hpp"
#include "evochain/errors.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace evochain;
using evochain::testing::Fixture;
using evochain::testing::hand_model;
using evochain::testing::paper;

namespace {

// Papers on a single community, with random membership strengths.
std::unique_ptr<Fixture> random_fixture(std::mt19937_64& rng, int papers) {
  auto corpus = testing::random_corpus(rng, papers, 6);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<std::vector<std::pair<int, double>>> rows;
  for (int i = 0; i < papers; ++i) rows.push_back({{0, u(rng)}, {1, 0.05 * u(rng)}});
  return std::make_unique<Fixture>(std::move(corpus), hand_model(2, rows, 1, 1));
}

CandidatePool whole_pool(const Fixture& f) {
  CandidatePool pool;
  for (std::size_t p = 0; p < f.corpus.size(); ++p) pool.papers.emplace_back(p, 1.0);
  return pool;
}

void check_chain(const Corpus& corpus, const Chain& chain, std::size_t n) {
  CHECK(chain.size() == n);
  CHECK_NOTHROW(validate_chain(corpus, chain));
}

}  // namespace

TEST_CASE("query kinds") {
  CHECK(parse_query_kind("two_paper") == QueryKind::TwoPaper);
  CHECK(std::string(to_string(QueryKind::Keyword)) == "keyword");
  CHECK_THROWS_AS(parse_query_kind("papers"), ValidationError);
}

TEST_CASE("single-paper candidate pool") {
  // Five papers in community 0 with different strengths; p = 2.
  std::vector<std::vector<std::pair<int, double>>> rows{
      {{0, 0.3}, {1, 0.1}}, {{0, 0.1}, {1, 0.2}}, {{0, 0.2}, {1, 0.05}}, {{0, 0.25}}, {{0, 0.15}, {1, 0.55}}};
  auto m = hand_model(2, rows, 1, 1);
  m.core << 0.7, 0.3;
  std::vector<PaperRecord> papers;
  for (int i = 0; i < 5; ++i) papers.push_back(paper("m" + std::to_string(i), 2000 + i, "x"));
  Corpus corpus(std::move(papers));
  CommunityIndex index(m, 0.1);
  REQUIRE(index.members(0).size() == 5);

  auto pool = candidate_pool_single(corpus, m, index, 2, 0, 50, 2);
  REQUIRE(pool.papers.size() == 5);
  for (auto [q, rel] : pool.papers) {
    double brute = 0.0;
    for (int k = 0; k < 2; ++k) brute += m.core[k] * m.U1(2, k) * m.U1(static_cast<Eigen::Index>(q), k);
    CHECK(rel == doctest::Approx(brute).epsilon(1e-15));
  }
  for (std::size_t i = 1; i < pool.papers.size(); ++i) CHECK(pool.papers[i - 1].second >= pool.papers[i].second);

  // The query paper survives truncation.
  auto small = candidate_pool_single(corpus, m, index, 2, 0, 2, 2);
  CHECK(small.papers.size() == 2);
  CHECK(std::any_of(small.papers.begin(), small.papers.end(), [](auto& e) { return e.first == 2; }));

  CHECK_THROWS_WITH_AS(candidate_pool_single(corpus, m, index, 2, 0, 50, 6), doctest::Contains("community too small"),
                       ValidationError);
  // Community 1 at com_t 0.5 holds paper 4 alone.
  CommunityIndex strict(m, 0.5);
  CHECK_THROWS_AS(candidate_pool_single(corpus, m, strict, 4, 1, 50, 2), ValidationError);
  CHECK(EngineConfig{}.M == 50);
}

TEST_CASE("two-paper candidate pool") {
  std::vector<std::vector<std::pair<int, double>>> rows{{{0, 0.3}},           {{0, 0.1}, {1, 0.4}}, {{0, 0.2}},
                                                        {{0, 0.05}, {1, 0.2}}, {{0, 0.15}},          {{0, 0.2}, {1, 0.4}}};
  auto m = hand_model(2, rows, 1, 1);
  m.core << 0.6, 0.4;
  std::vector<PaperRecord> papers;
  for (int i = 0; i < 6; ++i) papers.push_back(paper("t" + std::to_string(i), 2000 + i, "x"));
  Corpus corpus(std::move(papers));
  CommunityIndex index(m, 0.05);

  auto pool = candidate_pool_pair(corpus, m, index, 0, 5, 0, 50);
  CHECK(pool.papers.size() == 6);
  for (auto [q, rel] : pool.papers) {
    double brute = 0.0;
    for (int k = 0; k < 2; ++k)
      brute += m.core[k] * m.U1(static_cast<Eigen::Index>(q), k) * m.U1(0, k) * m.U1(5, k);
    CHECK(rel == doctest::Approx(brute).epsilon(1e-15));
  }
  // Only papers strictly between the endpoints, plus the endpoints.
  auto inner = candidate_pool_pair(corpus, m, index, 1, 4, 0, 50);
  std::set<std::size_t> got;
  for (auto [q, rel] : inner.papers) got.insert(q);
  CHECK(got == std::set<std::size_t>{1, 2, 3, 4});

  CHECK_THROWS_WITH_AS(candidate_pool_pair(corpus, m, index, 2, 2, 0, 50), "distinct papers required",
                       ValidationError);
  CHECK_THROWS_WITH_AS(candidate_pool_pair(corpus, m, index, 0, 1, 1, 50), "papers share no community", QueryError);
}

TEST_CASE("keyword candidate pools") {
  std::vector<PaperRecord> papers{paper("k1", 2001, "hyperspectral unmixing"),
                                  paper("k2", 2002, "hyperspectral hyperspectral imagery"),
                                  paper("k3", 2003, "hyperspectral sensors"),
                                  paper("k4", 2004, "radar imagery"),
                                  paper("k5", 2005, "radar sensors")};
  for (auto& p : papers) p.title = "";
  std::vector<std::vector<std::pair<int, double>>> rows{{{0, 1}}, {{0, 1}}, {{0, 1}}, {{1, 1}}, {{1, 1}}};
  Fixture f(Corpus(std::move(papers)), hand_model(2, rows, 1, 1));
  CommunityIndex index(f.model, 0.2);

  auto pools = candidate_pool_keyword(f.corpus, f.vocab, f.stopwords, f.relations.content, index, "hyperspectral", 100, 2);
  REQUIRE(pools.pools.size() == 1);
  CHECK(pools.pools[0].community == 0);
  CHECK(pools.pools[0].papers.size() == 3);
  CHECK(pools.pools[0].papers[0].first == 1);  // tf = 2 ranks first

  CHECK_THROWS_AS(candidate_pool_keyword(f.corpus, f.vocab, f.stopwords, f.relations.content, index, "the of and", 100, 2),
                  QueryError);
  CHECK_THROWS_WITH_AS(candidate_pool_keyword(f.corpus, f.vocab, f.stopwords, f.relations.content, index, "lidar", 100, 2),
                       doctest::Contains("unknown keyword"), QueryError);

  auto capped = candidate_pool_keyword(f.corpus, f.vocab, f.stopwords, f.relations.content, index, "imagery sensors", 1, 1);
  std::size_t total = 0;
  for (const auto& p : capped.pools) total += p.papers.size();
  CHECK(total == 1);
  CHECK(EngineConfig{}.N == 100);
}

TEST_CASE("chain search") {
  SUBCASE("pool of exactly n papers") {
    std::mt19937_64 rng(1);
    auto f = random_fixture(rng, 4);
    auto pool = whole_pool(*f);
    ChainConstraint c{QueryKind::Keyword, {}, {}};
    auto a = best_chain(f->corpus, pool, c, 4, 0.05, *f->influence, SearchMode::exhaustive());
    auto b = best_chain(f->corpus, pool, c, 4, 0.05, *f->influence, SearchMode::beam(64));
    CHECK(a.chain == b.chain);
    check_chain(f->corpus, a.chain, 4);
  }
  SUBCASE("beam matches exhaustive and enumeration") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 6; ++t) {
      auto f = random_fixture(rng, 8 + t % 3);
      auto pool = whole_pool(*f);
      std::vector<ChainConstraint> constraints{{QueryKind::Keyword, {}, {}},
                                               {QueryKind::SinglePaper, static_cast<std::size_t>(t % 8), {}}};
      for (const auto& c : constraints) {
        auto ex = best_chain(f->corpus, pool, c, 4, 0.05, *f->influence, SearchMode::exhaustive());
        auto bm = best_chain(f->corpus, pool, c, 4, 0.05, *f->influence, SearchMode::beam(64));
        auto en = oracle::enumerate_chains(f->corpus, pool, c, 4, 0.05, *f->influence);
        CHECK(bm.coherence.score == doctest::Approx(ex.coherence.score).epsilon(1e-9));
        CHECK(ex.coherence.score == doctest::Approx(en.coherence.score).epsilon(1e-9));
        CHECK(ex.chain == en.chain);
        check_chain(f->corpus, bm.chain, 4);
        if (c.kind == QueryKind::SinglePaper)
          CHECK(std::count(bm.chain.papers.begin(), bm.chain.papers.end(), *c.anchor) == 1);
      }
    }
  }
  SUBCASE("two-paper endpoints") {
    std::mt19937_64 rng(5);
    auto f = random_fixture(rng, 9);
    auto pool = whole_pool(*f);
    std::vector<std::size_t> order(9);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return f->corpus.precedes(a, b); });
    ChainConstraint c{QueryKind::TwoPaper, order[1], order[8]};
    for (auto mode : {SearchMode::exhaustive(), SearchMode::beam(4)}) {
      auto res = best_chain(f->corpus, pool, c, 5, 0.05, *f->influence, mode);
      CHECK(res.chain.papers.front() == order[1]);
      CHECK(res.chain.papers.back() == order[8]);
      check_chain(f->corpus, res.chain, 5);
    }
    ChainConstraint tight{QueryKind::TwoPaper, order[6], order[8]};
    CHECK_THROWS_AS(best_chain(f->corpus, pool, tight, 5, 0.05, *f->influence, SearchMode::beam(8)), QueryError);
  }
  SUBCASE("pool smaller than the chain") {
    std::mt19937_64 rng(6);
    auto f = random_fixture(rng, 3);
    CHECK_THROWS_AS(best_chain(f->corpus, whole_pool(*f), {}, 4, 0.05, *f->influence, SearchMode::beam(8)),
                    ValidationError);
  }
}
