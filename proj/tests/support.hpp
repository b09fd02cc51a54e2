#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "evochain/config.hpp"
#include "evochain/corpus.hpp"
#include "evochain/factorization.hpp"
#include "evochain/influence.hpp"
#include "evochain/peg.hpp"

namespace evochain::testing {

inline PaperRecord paper(std::string id, int year, std::string abstract, std::vector<std::string> cites = {},
                         std::vector<std::string> authors = {}) {
  PaperRecord p;
  p.id = std::move(id);
  p.title = "Paper " + p.id;
  p.year = year;
  p.abstract = std::move(abstract);
  p.cites = std::move(cites);
  p.authors = std::move(authors);
  return p;
}

// Everything a query needs, with the community model supplied by hand.
struct Fixture {
  Corpus corpus;
  StopWords stopwords = default_stopwords();
  Vocabulary vocab;
  RelationSet relations;
  MetaFacModel model;
  std::unique_ptr<BipartiteWalkGraph> graph;
  std::unique_ptr<InfluenceCalculator> influence;
  EngineConfig config;

  Fixture(Corpus c, MetaFacModel m, EngineConfig cfg = {}) : corpus(std::move(c)), model(std::move(m)), config(cfg) {
    vocab = build_vocabulary(corpus, stopwords, 1);
    relations = build_relations(corpus, vocab, stopwords);
    graph = std::make_unique<BipartiteWalkGraph>(build_walk_graph(relations.content, config.restart));
    influence = std::make_unique<InfluenceCalculator>(*graph);
  }
  Fixture(const Fixture&) = delete;

  QueryContext context() const { return {corpus, vocab, stopwords, relations, model, *influence, config}; }
};

// Uniform core over K communities and one-hot (or mixed) paper rows.
inline MetaFacModel hand_model(int K, const std::vector<std::vector<std::pair<int, double>>>& rows,
                               std::size_t words, std::size_t authors) {
  MetaFacModel m;
  m.K = K;
  m.core = Eigen::VectorXd::Constant(K, 1.0 / K);
  m.U1 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), K);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (auto [k, v] : rows[i]) m.U1(static_cast<Eigen::Index>(i), k) = v;
  m.U2 = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(std::max<std::size_t>(words, 1)), K, 1.0);
  m.U3 = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(std::max<std::size_t>(authors, 1)), K, 1.0);
  m.objective_trace = {0.0};
  return m;
}

// Two topical groups of seven papers each, plus a query paper "Q" that mixes
// both: p(8 | Q) = 0.26, p(14 | Q) = 0.74 under a uniform core.
inline std::unique_ptr<Fixture> two_community_fixture() {
  static const char* a_words[] = {"raster", "pixel", "band", "spectral", "sensor", "radiance", "albedo"};
  static const char* b_words[] = {"kernel", "margin", "vector", "classifier", "hinge", "boosting", "forest"};
  std::vector<PaperRecord> papers;
  std::vector<std::vector<std::pair<int, double>>> rows;
  for (int i = 0; i < 7; ++i) {
    std::string text;
    for (int k = 0; k < 3; ++k) text += std::string(a_words[(i + k) % 7]) + " ";
    papers.push_back(paper("A" + std::to_string(i), 2000 + i, text));
    rows.push_back({{8, 1.0}});
  }
  for (int i = 0; i < 7; ++i) {
    std::string text;
    for (int k = 0; k < 3; ++k) text += std::string(b_words[(i + k) % 7]) + " ";
    papers.push_back(paper("B" + std::to_string(i), 2000 + i, text));
    rows.push_back({{14, 1.0}});
  }
  papers.push_back(paper("Q", 2003, "spectral band kernel margin classifier"));
  rows.push_back({{8, 0.26}, {14, 0.74}});
  Corpus corpus(std::move(papers));
  auto model = hand_model(30, rows, 0, 0);
  EngineConfig cfg;
  cfg.K = 30;
  auto f = std::make_unique<Fixture>(std::move(corpus), model, cfg);
  f->model.U2 = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(f->vocab.size()), 30, 1.0 / f->vocab.size());
  f->model.U3 = Eigen::MatrixXd::Constant(1, 30, 1.0);
  return f;
}

// Random corpus over a small vocabulary; years are drawn so that ties occur.
inline Corpus random_corpus(std::mt19937_64& rng, int papers, int words) {
  std::vector<PaperRecord> out;
  std::uniform_int_distribution<int> word(0, words - 1), year(2000, 2006), len(2, 5);
  for (int i = 0; i < papers; ++i) {
    std::string text;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) text += "term" + std::string(1, static_cast<char>('b' + word(rng))) + "x ";
    char id[16];
    std::snprintf(id, sizeof id, "R%02d", i);
    out.push_back(paper(id, year(rng), text));
  }
  return Corpus(std::move(out));
}

}  // namespace evochain::testing
