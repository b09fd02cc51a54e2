#pragma once

#include <memory>
#include <string>

#include "evochain/config.hpp"
#include "evochain/corpus.hpp"
#include "evochain/factorization.hpp"
#include "evochain/influence.hpp"
#include "evochain/peg.hpp"

#include "json.hpp"

namespace evochain {

inline constexpr int kIndexVersion = 1;

// A built index: corpus, vocabulary, relations, fitted model and the walk
// graph, plus the influence memo shared by every query. Immutable after
// construction apart from the memo.
class Engine {
 public:
  static Engine build(Corpus corpus, const EngineConfig& config, StopWords stopwords = default_stopwords());
  static Engine load(const std::string& dir);

  // Writes the bundle next to `dir` and renames it into place, so a failed
  // save never leaves a partial bundle behind.
  void save(const std::string& dir) const;

  QueryOutcome query(const QuerySpec& spec) const;
  QueryContext context() const;

  const EngineConfig& config() const { return *config_; }
  const Corpus& corpus() const { return *corpus_; }
  const Vocabulary& vocabulary() const { return *vocab_; }
  const StopWords& stopwords() const { return *stopwords_; }
  const RelationSet& relations() const { return *relations_; }
  const MetaFacModel& model() const { return *model_; }
  const BipartiteWalkGraph& walk_graph() const { return *graph_; }
  const InfluenceCalculator& influence() const { return *influence_; }

  // Hash of the corpus and every index-time parameter.
  std::string fingerprint() const;
  nlohmann::ordered_json config_json() const;

 private:
  Engine() = default;
  void finish();

  std::shared_ptr<const EngineConfig> config_;
  std::shared_ptr<const StopWords> stopwords_;
  std::shared_ptr<const Corpus> corpus_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const RelationSet> relations_;
  std::shared_ptr<const MetaFacModel> model_;
  std::shared_ptr<const BipartiteWalkGraph> graph_;
  std::shared_ptr<const InfluenceCalculator> influence_;
};

}  // namespace evochain
