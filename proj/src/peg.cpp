#include "evochain/peg.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "evochain/errors.hpp"
#include "json.hpp"

namespace evochain {

namespace {

bool node_before(const GraphNode& a, const GraphNode& b) {
  if (a.year != b.year) return a.year < b.year;
  return a.id < b.id;
}

}  // namespace

EvolutionGraph merge_chains(const std::vector<LabeledChain>& chains) {
  EvolutionGraph g;
  std::map<std::string, GraphNode> nodes;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> edges;
  for (const auto& c : chains) {
    GraphChain summary{c.label, {}, c.score, c.topic_words};
    for (std::size_t k = 0; k < c.nodes.size(); ++k) {
      nodes.emplace(c.nodes[k].id, c.nodes[k]);
      summary.papers.push_back(c.nodes[k].id);
      if (k == 0) continue;
      auto& labels = edges[{c.nodes[k - 1].id, c.nodes[k].id}];
      if (std::find(labels.begin(), labels.end(), c.label) == labels.end()) labels.push_back(c.label);
    }
    g.chains.push_back(std::move(summary));
  }
  for (auto& [id, node] : nodes) g.nodes.push_back(node);
  std::sort(g.nodes.begin(), g.nodes.end(), node_before);

  std::map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) order[g.nodes[i].id] = i;
  for (auto& [key, labels] : edges) g.edges.push_back({key.first, key.second, labels});
  std::sort(g.edges.begin(), g.edges.end(), [&](const GraphEdge& a, const GraphEdge& b) {
    return std::pair(order[a.from], order[a.to]) < std::pair(order[b.from], order[b.to]);
  });
  return g;
}

void validate_graph(const EvolutionGraph& g) {
  std::map<std::string, const GraphNode*> nodes;
  for (const auto& n : g.nodes)
    if (!nodes.emplace(n.id, &n).second) throw ValidationError("duplicate node " + n.id);
  std::map<std::pair<std::string, std::string>, const GraphEdge*> edges;
  for (const auto& e : g.edges) {
    auto from = nodes.find(e.from);
    auto to = nodes.find(e.to);
    if (from == nodes.end() || to == nodes.end()) throw ValidationError("edge references a missing node");
    if (!node_before(*from->second, *to->second))
      throw ValidationError("edge " + e.from + " -> " + e.to + " goes back in time");
    edges[{e.from, e.to}] = &e;
  }
  for (const auto& c : g.chains) {
    for (std::size_t k = 0; k < c.papers.size(); ++k) {
      if (!nodes.contains(c.papers[k])) throw ValidationError("chain " + c.label + " references a missing node");
      if (k == 0) continue;
      auto e = edges.find({c.papers[k - 1], c.papers[k]});
      if (e == edges.end() ||
          std::find(e->second->chains.begin(), e->second->chains.end(), c.label) == e->second->chains.end())
        throw ValidationError("chain " + c.label + " step has no labeled edge");
    }
  }
}

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out + '"';
}

std::string to_dot(const EvolutionGraph& g) {
  std::map<std::string, std::size_t> chain_index;
  for (std::size_t i = 0; i < g.chains.size(); ++i) chain_index.emplace(g.chains[i].label, i);

  std::ostringstream out;
  out << "digraph peg {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box];\n";
  for (const auto& n : g.nodes)
    out << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.title + " (" + std::to_string(n.year) + ")")
        << "];\n";
  for (const auto& e : g.edges) {
    std::string labels;
    std::string colors;
    for (const auto& l : e.chains) {
      if (!labels.empty()) {
        labels += ",";
        colors += ":";
      }
      labels += l;
      auto it = chain_index.find(l);
      colors += kPalette[(it == chain_index.end() ? 0 : it->second) % kPalette.size()];
    }
    out << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to) << " [chain=" << dot_quote(labels)
        << ", color=" << dot_quote(colors) << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string to_json(const EvolutionGraph& g) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const auto& n : g.nodes) {
    ordered_json j;
    j["id"] = n.id;
    j["title"] = n.title;
    j["year"] = n.year;
    j["communities"] = n.communities;
    doc["nodes"].push_back(std::move(j));
  }
  doc["edges"] = ordered_json::array();
  for (const auto& e : g.edges) {
    ordered_json j;
    j["from"] = e.from;
    j["to"] = e.to;
    j["chains"] = e.chains;
    doc["edges"].push_back(std::move(j));
  }
  doc["chains"] = ordered_json::array();
  for (const auto& c : g.chains) {
    ordered_json j;
    j["label"] = c.label;
    j["papers"] = c.papers;
    j["score"] = c.score;
    j["topic_words"] = c.topic_words;
    doc["chains"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string export_graph(const EvolutionGraph& g, const std::string& format) {
  if (format == "dot") return to_dot(g);
  if (format == "json") return to_json(g);
  throw ValidationError("unknown export format '" + format + "'");
}

EvolutionGraph graph_from_json(const std::string& text) {
  EvolutionGraph g;
  try {
    auto doc = nlohmann::json::parse(text);
    for (const auto& j : doc.at("nodes"))
      g.nodes.push_back({j.at("id").get<std::string>(), j.at("title").get<std::string>(), j.at("year").get<int>(),
                         j.at("communities").get<std::vector<int>>()});
    for (const auto& j : doc.at("edges"))
      g.edges.push_back({j.at("from").get<std::string>(), j.at("to").get<std::string>(),
                         j.at("chains").get<std::vector<std::string>>()});
    for (const auto& j : doc.at("chains"))
      g.chains.push_back({j.at("label").get<std::string>(), j.at("papers").get<std::vector<std::string>>(),
                          j.at("score").get<double>(), j.at("topic_words").get<std::vector<std::string>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad evolution graph JSON: ") + e.what());
  }
  return g;
}

std::vector<std::string> topic_words(const TopicSequence& topics, const Vocabulary& vocab, std::size_t count) {
  if (topics.topics.empty()) return {};
  std::vector<double> avg(topics.topics.front().size(), 0.0);
  for (const auto& t : topics.topics)
    for (std::size_t w = 0; w < avg.size() && w < t.size(); ++w) avg[w] += t[w];
  std::vector<std::size_t> order;
  for (std::size_t w = 0; w < avg.size(); ++w)
    if (avg[w] > 1e-12) order.push_back(w);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return avg[a] > avg[b]; });
  if (order.size() > count) order.resize(count);
  std::vector<std::string> out;
  for (auto w : order) out.push_back(vocab.term(w));
  return out;
}

namespace {

struct Resolved {
  std::size_t length;
  double com_t;
  double r;
  std::size_t M;
  std::size_t N;
  std::size_t beam;
};

Resolved resolve(const QuerySpec& spec, const EngineConfig& config) {
  EngineConfig c = config;
  if (spec.chain_length) c.chain_length = *spec.chain_length;
  if (spec.com_t) c.com_t = *spec.com_t;
  if (spec.r) c.r = *spec.r;
  if (spec.M) c.M = *spec.M;
  if (spec.N) c.N = *spec.N;
  if (spec.beam_width) c.beam_width = *spec.beam_width;
  c.validate();
  return {static_cast<std::size_t>(c.chain_length), c.com_t, c.r, c.M, c.N, c.beam_width};
}

std::size_t required_paper(const Corpus& corpus, const std::optional<std::string>& id, const char* field) {
  if (!id || id->empty()) throw ValidationError(std::string("query needs ") + field);
  return corpus.index_of(*id);
}

}  // namespace

QueryOutcome run_query(const QuerySpec& spec, const QueryContext& ctx) {
  const auto params = resolve(spec, ctx.config);
  const CommunityIndex index(ctx.model, params.com_t);
  const auto& corpus = ctx.corpus;
  QueryOutcome outcome;

  struct Task {
    CandidatePool pool;
    ChainConstraint constraint;
  };
  std::vector<Task> tasks;
  auto skip = [&](int k, const std::exception& e) {
    outcome.warnings.push_back("community " + std::to_string(k) + ": " + e.what());
  };

  switch (spec.kind) {
    case QueryKind::SinglePaper: {
      if (spec.keyword || spec.paper_b) throw ValidationError("single_paper queries take only paper_a");
      const auto p = required_paper(corpus, spec.paper_a, "paper_a");
      const auto& communities = index.communities_of(p);
      if (communities.empty()) throw QueryError("paper " + corpus.paper(p).id + " belongs to no community");
      for (int k : communities) {
        try {
          tasks.push_back({candidate_pool_single(corpus, ctx.model, index, p, k, params.M, params.length),
                           {QueryKind::SinglePaper, p, std::nullopt}});
        } catch (const ValidationError& e) {
          skip(k, e);
        }
      }
      break;
    }
    case QueryKind::TwoPaper: {
      if (spec.keyword) throw ValidationError("two_paper queries take only paper_a and paper_b");
      auto a = required_paper(corpus, spec.paper_a, "paper_a");
      auto b = required_paper(corpus, spec.paper_b, "paper_b");
      if (a == b) throw ValidationError("distinct papers required");
      if (corpus.precedes(b, a)) std::swap(a, b);
      std::vector<int> shared;
      for (int k : index.communities_of(a))
        if (index.contains(k, b)) shared.push_back(k);
      if (shared.empty()) throw QueryError("papers share no community");
      for (int k : shared) tasks.push_back({candidate_pool_pair(corpus, ctx.model, index, a, b, k, params.M),
                                            {QueryKind::TwoPaper, a, b}});
      break;
    }
    case QueryKind::Keyword: {
      if (spec.paper_a || spec.paper_b) throw ValidationError("keyword queries take only keyword");
      if (!spec.keyword || spec.keyword->empty()) throw ValidationError("query needs keyword");
      auto pools = candidate_pool_keyword(corpus, ctx.vocab, ctx.stopwords, ctx.relations.content, index,
                                          *spec.keyword, params.N, params.length);
      outcome.warnings = pools.dropped;
      for (auto& pool : pools.pools) tasks.push_back({std::move(pool), {QueryKind::Keyword, std::nullopt, std::nullopt}});
      break;
    }
  }

  std::vector<LabeledChain> chains;
  for (const auto& task : tasks) {
    try {
      auto res = best_chain(corpus, task.pool, task.constraint, params.length, params.r, ctx.influence,
                            SearchMode::beam(params.beam));
      LabeledChain lc;
      lc.label = "chain-" + std::to_string(chains.size() + 1);
      lc.score = res.coherence.score;
      lc.topic_words = topic_words(res.coherence.topics, ctx.vocab);
      for (auto p : res.chain.papers) {
        const auto& rec = corpus.paper(p);
        const auto& comms = index.communities_of(p);
        lc.nodes.push_back({rec.id, rec.title, rec.year, std::vector<int>(comms.begin(), comms.end())});
      }
      chains.push_back(std::move(lc));
    } catch (const ValidationError& e) {
      skip(task.pool.community, e);
    } catch (const QueryError& e) {
      skip(task.pool.community, e);
    }
  }
  if (chains.empty()) {
    std::string msg = "no coherent chain found";
    for (const auto& w : outcome.warnings) msg += "; " + w;
    throw QueryError(msg);
  }
  outcome.graph = merge_chains(chains);
  return outcome;
}

}  // namespace evochain
