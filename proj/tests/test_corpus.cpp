#include <cmath>
#include <sstream>

#include "doctest.h"
#include "evochain/corpus.hpp"
#include "evochain/errors.hpp"
#include "evochain/text.hpp"
#include "support.hpp"

using namespace evochain;
using evochain::testing::paper;

namespace {

PaperRecord bare(std::string id, std::string abstract) {
  auto p = paper(std::move(id), 2000, std::move(abstract));
  p.title.clear();
  return p;
}

}  // namespace

TEST_CASE("porter stemmer reference words") {
  CHECK(porter_stem("sparse") == "spars");
  CHECK(porter_stem("coding") == "code");
  CHECK(porter_stem("graphs") == "graph");
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("controlling") == "control");
  CHECK(porter_stem("generalizations") == "gener");
  CHECK(porter_stem("maps") == "map");
}

TEST_CASE("tokenizer") {
  auto t = tokenize("Sparse-coding of 3D graphs, 2019 a b");
  CHECK(t == std::vector<std::string>{"sparse", "coding", "of", "3d", "graphs"});
}

TEST_CASE("corpus loading") {
  SUBCASE("three valid records") {
    std::istringstream in(
        R"({"id":"a","title":"A","year":2001,"cites":["b"]}
{"id":"b","title":"B","year":2000}
{"id":"c","title":"C","year":2002,"authors":["x","y"]})");
    auto c = parse_corpus(in);
    CHECK(c.size() == 3);
    CHECK(c.report().empty());
    CHECK(c.index_of("c") == 2);
  }
  SUBCASE("dangling citation is reported, not fatal") {
    std::istringstream in(R"({"id":"a","title":"A","year":2001,"cites":["x9"]})");
    auto c = parse_corpus(in);
    CHECK(c.size() == 1);
    REQUIRE(c.report().dangling.size() == 1);
    CHECK(c.report().dangling[0].cited == "x9");
  }
  SUBCASE("empty file") {
    std::istringstream in("");
    CHECK_THROWS_WITH_AS(parse_corpus(in), "empty corpus", ValidationError);
  }
  SUBCASE("malformed record names its ordinal") {
    std::istringstream in("{\"id\":\"a\",\"title\":\"A\",\"year\":2001}\n{oops\n");
    CHECK_THROWS_WITH_AS(parse_corpus(in), doctest::Contains("record 2"), ParseError);
  }
  SUBCASE("duplicate id") {
    std::istringstream in("{\"id\":\"a\",\"title\":\"A\",\"year\":2001}\n{\"id\":\"a\",\"title\":\"B\",\"year\":2002}\n");
    CHECK_THROWS_AS(parse_corpus(in), ValidationError);
  }
  SUBCASE("record without a year is dropped") {
    std::istringstream in("{\"id\":\"a\",\"title\":\"A\",\"year\":2001}\n{\"id\":\"b\",\"title\":\"B\"}\n");
    auto c = parse_corpus(in);
    CHECK(c.size() == 1);
    REQUIRE(c.report().dropped.size() == 1);
    CHECK(c.report().dropped[0].ordinal == 2);
  }
  SUBCASE("unreadable file") { CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError); }
  SUBCASE("write then parse") {
    Corpus c({paper("a", 2001, "one two", {"b"}, {"x"}), paper("b", 2000, "three")});
    std::ostringstream out;
    write_corpus(out, c);
    std::istringstream in(out.str());
    auto d = parse_corpus(in);
    CHECK(d.papers()[0].cites == std::vector<std::string>{"b"});
    CHECK(d.papers()[1].abstract == "three");
  }
}

TEST_CASE("vocabulary") {
  SUBCASE("stemmed terms and document frequency") {
    Corpus c({bare("1", "sparse coding"), bare("2", "sparse graphs")});
    auto v = build_vocabulary(c, {}, 1);
    CHECK(v.terms() == std::vector<std::string>{"code", "graph", "spars"});
    CHECK(v.doc_freq(*v.find("spars")) == 2);
  }
  SUBCASE("stop words removed") {
    Corpus c({bare("1", "the map of maps")});
    auto v = build_vocabulary(c, StopWords{"the", "of"}, 1);
    CHECK(v.terms() == std::vector<std::string>{"map"});
  }
  SUBCASE("impossible threshold") {
    Corpus c({paper("1", 2000, "alpha"), paper("2", 2001, "beta")});
    CHECK_THROWS_WITH_AS(build_vocabulary(c, {}, 3), "empty vocabulary", ValidationError);
  }
  SUBCASE("deterministic") {
    Corpus c({paper("1", 2000, "graphs of sparse signals"), paper("2", 2001, "signal graphs")});
    auto a = build_vocabulary(c, default_stopwords(), 1);
    auto b = build_vocabulary(c, default_stopwords(), 1);
    CHECK(a.terms() == b.terms());
    CHECK(a.doc_freqs() == b.doc_freqs());
  }
}

TEST_CASE("tf-idf") {
  CHECK(tfidf(2, 100, 10) == doctest::Approx(2.0 * std::log(10.0)).epsilon(1e-12));
  CHECK(tfidf(2, 100, 10) == doctest::Approx(4.60517).epsilon(1e-6));
  CHECK(tfidf(7, 50, 50) == 0.0);
  CHECK(tfidf(0, 100, 10) == 0.0);

  Corpus c({paper("1", 2000, "alpha alpha"), paper("2", 2001, "beta")});
  auto v = build_vocabulary(c, {}, 1);
  CHECK_THROWS_AS(tfidf_weight("gamma", count_terms(c.paper(0), {}), v), LookupError);
}

TEST_CASE("relations") {
  SUBCASE("symmetrized citation") {
    Corpus c({paper("p1", 2001, "alpha", {"p2"}), paper("p2", 2000, "beta")});
    auto v = build_vocabulary(c, {}, 1);
    auto r = build_relations(c, v, {});
    Eigen::MatrixXd cit(r.citation);
    Eigen::MatrixXd expect(2, 2);
    expect << 0, 1, 1, 0;
    CHECK(cit == expect);
    auto directed = build_relations(c, v, {}, false);
    CHECK(directed.citation.coeff(0, 1) == 1.0);
    CHECK(directed.citation.coeff(1, 0) == 0.0);
  }
  SUBCASE("authorship row") {
    Corpus c({paper("p1", 2001, "alpha", {}, {"x", "y", "z"}), paper("p2", 2000, "beta", {}, {"x"})});
    auto r = build_relations(c, build_vocabulary(c, {}, 1), {});
    CHECK(r.authorship.row(0).sum() == 3.0);
    CHECK(r.authorship.row(0).nonZeros() == 3);
    CHECK(r.authors.size() == 3);
  }
  SUBCASE("content holds tf-idf") {
    Corpus c({paper("p1", 2001, "alpha alpha beta"), paper("p2", 2000, "beta gamma")});
    auto v = build_vocabulary(c, {}, 1);
    auto r = build_relations(c, v, {});
    const auto a = static_cast<Eigen::Index>(*v.find("alpha"));
    const auto b = static_cast<Eigen::Index>(*v.find("beta"));
    CHECK(r.content.coeff(0, a) == doctest::Approx(tfidf(2, 2, 1)));
    CHECK(r.content.coeff(0, b) == 0.0);
  }
  SUBCASE("shape at full scale") {
    // Consonant-only tokens pass the stemmer unchanged, so term and author
    // counts can be set exactly.
    const std::size_t P = 24491, W = 27730, A = 38094;
    static const char letters[] = "bcdfghjkmnpqrtvwxz";
    auto token = [](std::size_t n) {
      std::string s = "zz";
      do {
        s += letters[n % 18];
        n /= 18;
      } while (n);
      return s;
    };
    std::vector<PaperRecord> papers;
    papers.reserve(P);
    for (std::size_t i = 0; i < P; ++i) {
      PaperRecord p;
      p.id = "p" + std::to_string(i);
      p.title = "x";
      p.year = 2000;
      p.abstract = token(i) + " " + token(P + i % (W - P));
      p.authors = {"a" + std::to_string(i)};
      if (i < A - P) p.authors.push_back("a" + std::to_string(P + i));
      if (i > 0) p.cites = {"p" + std::to_string(i - 1)};
      papers.push_back(std::move(p));
    }
    Corpus c(std::move(papers));
    auto v = build_vocabulary(c, {}, 1);
    auto r = build_relations(c, v, {});
    CHECK(r.content.rows() == 24491);
    CHECK(r.content.cols() == 27730);
    CHECK(r.authorship.rows() == 24491);
    CHECK(r.authorship.cols() == 38094);
    CHECK(r.citation.rows() == 24491);
    CHECK(r.citation.cols() == 24491);
  }
}
