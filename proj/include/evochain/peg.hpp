#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evochain/chains.hpp"

namespace evochain {

struct GraphNode {
  std::string id;
  std::string title;
  int year = 0;
  std::vector<int> communities;
  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string from;
  std::string to;
  std::vector<std::string> chains;
  bool operator==(const GraphEdge&) const = default;
};

struct GraphChain {
  std::string label;
  std::vector<std::string> papers;
  double score = 0.0;
  std::vector<std::string> topic_words;
  bool operator==(const GraphChain&) const = default;
};

// Paper evolution graph: the union of labeled chains. Nodes are kept in
// (year, id) order, edges in (from, to) node order.
struct EvolutionGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<GraphChain> chains;
  bool operator==(const EvolutionGraph&) const = default;
};

// One chain ready for merging: its nodes in chain order plus its summary.
struct LabeledChain {
  std::string label;
  std::vector<GraphNode> nodes;
  double score = 0.0;
  std::vector<std::string> topic_words;
};

EvolutionGraph merge_chains(const std::vector<LabeledChain>& chains);

// Throws ValidationError when an edge points backwards in time, a chain step
// has no edge carrying its label, or a node is duplicated.
void validate_graph(const EvolutionGraph& g);

// format: "dot" or "json".
std::string export_graph(const EvolutionGraph& g, const std::string& format);
EvolutionGraph graph_from_json(const std::string& text);

// Top `count` words of the link-averaged topic (positive weight only).
std::vector<std::string> topic_words(const TopicSequence& topics, const Vocabulary& vocab, std::size_t count = 5);

// Everything a query reads. All members are immutable after construction
// except the influence memo, which is internally synchronized.
struct QueryContext {
  const Corpus& corpus;
  const Vocabulary& vocab;
  const StopWords& stopwords;
  const RelationSet& relations;
  const MetaFacModel& model;
  const InfluenceCalculator& influence;
  const EngineConfig& config;
};

struct QueryOutcome {
  EvolutionGraph graph;
  std::vector<std::string> warnings;
};

QueryOutcome run_query(const QuerySpec& spec, const QueryContext& ctx);

}  // namespace evochain
