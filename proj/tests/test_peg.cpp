#include <random>
#include <sstream>

#include "doctest.h"
#include "evochain/errors.hpp"
#include "evochain/peg.hpp"
#include "support.hpp"

using namespace evochain;

namespace {

LabeledChain chain(const std::string& label, const std::vector<std::pair<std::string, int>>& papers) {
  LabeledChain c;
  c.label = label;
  c.score = 0.125;
  c.topic_words = {"alpha", "beta"};
  for (const auto& [id, year] : papers) c.nodes.push_back({id, "Title of " + id, year, {0}});
  return c;
}

std::size_t count_lines(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (line.find(needle) != std::string::npos) ++n;
  return n;
}

}  // namespace

TEST_CASE("merging chains") {
  SUBCASE("disjoint chains") {
    auto g = merge_chains({chain("a", {{"a1", 2000}, {"a2", 2001}, {"a3", 2002}}),
                           chain("b", {{"b1", 2000}, {"b2", 2001}, {"b3", 2002}})});
    CHECK(g.nodes.size() == 6);
    CHECK(g.edges.size() == 4);
    CHECK(g.chains.size() == 2);
    CHECK_NOTHROW(validate_graph(g));
  }
  SUBCASE("identical chains under two labels") {
    auto g = merge_chains({chain("x", {{"p", 2000}, {"q", 2001}}), chain("y", {{"p", 2000}, {"q", 2001}})});
    CHECK(g.nodes.size() == 2);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].chains == std::vector<std::string>{"x", "y"});
  }
  SUBCASE("two six-chains sharing two papers") {
    auto g = merge_chains({chain("c1", {{"s1", 2000}, {"a1", 2001}, {"a2", 2002}, {"s2", 2003}, {"a3", 2004}, {"a4", 2005}}),
                           chain("c2", {{"b1", 1999}, {"s1", 2000}, {"b2", 2001}, {"b3", 2002}, {"s2", 2003}, {"b4", 2006}})});
    CHECK(g.nodes.size() == 10);
    CHECK(g.edges.size() == 10);
    CHECK_NOTHROW(validate_graph(g));
  }
  SUBCASE("five-chains overlapping in two nodes") {
    // Shared middle segment c -> d, like a fork and re-join.
    auto g = merge_chains({chain("u", {{"a", 2001}, {"c", 2003}, {"d", 2004}, {"e", 2006}, {"f", 2007}}),
                           chain("v", {{"b", 2002}, {"c", 2003}, {"d", 2004}, {"g", 2005}, {"h", 2008}})});
    CHECK(g.nodes.size() == 8);
    CHECK(g.edges.size() == 7);
    auto cd = std::find_if(g.edges.begin(), g.edges.end(), [](auto& e) { return e.from == "c" && e.to == "d"; });
    REQUIRE(cd != g.edges.end());
    CHECK(cd->chains.size() == 2);
  }
  SUBCASE("nodes ordered by year then id") {
    auto g = merge_chains({chain("z", {{"m", 2001}, {"b", 2003}}), chain("y", {{"k", 2001}, {"a", 2004}})});
    std::vector<std::string> ids;
    for (const auto& n : g.nodes) ids.push_back(n.id);
    CHECK(ids == std::vector<std::string>{"k", "m", "b", "a"});
  }
}

TEST_CASE("validation catches broken graphs") {
  auto g = merge_chains({chain("a", {{"p", 2000}, {"q", 2001}})});
  auto back = g;
  std::swap(back.edges[0].from, back.edges[0].to);
  CHECK_THROWS_AS(validate_graph(back), ValidationError);
  auto missing = g;
  missing.nodes.pop_back();
  CHECK_THROWS_AS(validate_graph(missing), ValidationError);
}

TEST_CASE("export") {
  auto g = merge_chains({chain("chain-1", {{"p1", 2001}, {"p2", 2005}})});
  auto dot = export_graph(g, "dot");
  CHECK(count_lines(dot, "[label=") == 2);
  CHECK(count_lines(dot, "->") == 1);
  CHECK(dot == export_graph(g, "dot"));
  CHECK(export_graph(g, "json") == export_graph(g, "json"));
  CHECK_THROWS_AS(export_graph(g, "svg"), ValidationError);

  auto big = merge_chains({chain("c1", {{"s1", 2000}, {"a1", 2001}, {"s2", 2003}}),
                           chain("c2", {{"b1", 1999}, {"s1", 2000}, {"s2", 2003}})});
  big.nodes[0].title = "Quotes \" and \\ backslashes";
  CHECK(graph_from_json(export_graph(big, "json")) == big);
  CHECK(graph_from_json(export_graph(g, "json")) == g);
  CHECK_THROWS_AS(graph_from_json("{\"nodes\": 3}"), ParseError);
}

TEST_CASE("query on the two-community fixture") {
  auto f = testing::two_community_fixture();
  QuerySpec spec;
  spec.kind = QueryKind::SinglePaper;
  spec.paper_a = "Q";
  auto out = run_query(spec, f->context());
  CHECK(out.warnings.empty());
  REQUIRE(out.graph.chains.size() == 2);
  CHECK(out.graph.nodes.size() <= 12);
  CHECK(out.graph.nodes.size() >= 6);
  for (const auto& c : out.graph.chains) {
    CHECK(c.papers.size() == 6);
    CHECK(std::find(c.papers.begin(), c.papers.end(), "Q") != c.papers.end());
  }
  CHECK_NOTHROW(validate_graph(out.graph));
  // Byte-identical on a rerun.
  auto again = run_query(spec, f->context());
  CHECK(export_graph(out.graph, "json") == export_graph(again.graph, "json"));
  CHECK(export_graph(out.graph, "dot") == export_graph(again.graph, "dot"));

  // Lowering the threshold never loses chains here.
  spec.com_t = 0.1;
  CHECK(run_query(spec, f->context()).graph.chains.size() >= 2);

  SUBCASE("chain length beyond every community") {
    spec.chain_length = 9;
    CHECK_THROWS_WITH_AS(run_query(spec, f->context()), doctest::Contains("no coherent chain found"), QueryError);
  }
  SUBCASE("two papers from different communities") {
    QuerySpec pair;
    pair.kind = QueryKind::TwoPaper;
    pair.paper_a = "A0";
    pair.paper_b = "B6";
    CHECK_THROWS_WITH_AS(run_query(pair, f->context()), "papers share no community", QueryError);
    pair.paper_b = "A6";
    pair.chain_length = 4;
    auto res = run_query(pair, f->context());
    REQUIRE(res.graph.chains.size() == 1);
    CHECK(res.graph.chains[0].papers.front() == "A0");
    CHECK(res.graph.chains[0].papers.back() == "A6");
  }
  SUBCASE("unknown paper") {
    spec.paper_a = "nope";
    CHECK_THROWS_AS(run_query(spec, f->context()), LookupError);
  }
}

TEST_CASE("single-community corpus yields a single chain") {
  std::mt19937_64 rng(4);
  auto corpus = testing::random_corpus(rng, 12, 5);
  std::vector<std::vector<std::pair<int, double>>> rows(12, {{0, 1.0}});
  testing::Fixture f(std::move(corpus), testing::hand_model(2, rows, 1, 1));
  f.model.U2 = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(f.vocab.size()), 2, 0.5);
  QuerySpec spec;
  spec.kind = QueryKind::SinglePaper;
  spec.paper_a = "R03";
  spec.chain_length = 4;
  auto out = run_query(spec, f.context());
  CHECK(out.graph.chains.size() == 1);
  CHECK(out.graph.nodes.size() == 4);
  CHECK(out.graph.edges.size() == 3);
}
