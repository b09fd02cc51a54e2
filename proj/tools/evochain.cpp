// evochain: build an index from a corpus, query it for paper evolution
// graphs, or serve it over HTTP.

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "evochain/engine.hpp"
#include "evochain/errors.hpp"
#include "evochain/service.hpp"
#include "evochain/synthetic.hpp"

namespace {

using namespace evochain;

enum ExitCode { kOk = 0, kInput = 2, kQuery = 3, kNumeric = 4 };

struct IndexArgs {
  std::string corpus;
  std::string out;
  std::string stopwords;
  std::string weights;
  bool no_symmetrize = false;
  EngineConfig config;
};

struct QueryArgs {
  std::string index;
  std::string paper;
  std::string papers;
  std::string keyword;
  std::string format = "json";
  std::string out;
  std::optional<int> length;
  std::optional<double> r;
  std::optional<double> com_t;
  std::optional<std::size_t> M;
  std::optional<std::size_t> N;
  std::optional<std::size_t> beam;
  std::optional<int> K;
  std::optional<std::uint64_t> seed;
};

struct ServeArgs {
  std::string index;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

struct SynthArgs {
  std::string out;
  std::string labels;
  PlantedCorpusSpec spec;
};

int run_index(const IndexArgs& args) {
  EngineConfig config = args.config;
  if (!args.weights.empty()) config.weights = parse_weights(args.weights);
  config.symmetrize_citation = !args.no_symmetrize;
  config.validate();
  StopWords stopwords = args.stopwords.empty() ? default_stopwords() : load_stopwords(args.stopwords);

  const auto start = std::chrono::steady_clock::now();
  auto corpus = load_corpus(args.corpus);
  for (const auto& d : corpus.report().dropped)
    std::cerr << "dropped record " << d.ordinal << ": " << d.reason << "\n";
  if (!corpus.report().dangling.empty())
    std::cerr << corpus.report().dangling.size() << " dangling citation(s) ignored\n";

  auto engine = Engine::build(std::move(corpus), config, std::move(stopwords));
  engine.save(args.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& m = engine.model();
  const auto& trace = m.objective_trace;
  std::cout << "papers " << engine.corpus().size() << ", words " << engine.vocabulary().size() << ", authors "
            << engine.relations().authors.size() << "\n";
  std::cout << "objective " << trace.front() << " -> " << trace.back() << " in " << trace.size() - 1
            << " iterations\n";
  const CommunityIndex index(m, config.com_t);
  std::cout << "community sizes (com_t " << config.com_t << "):";
  for (int k = 0; k < m.K; ++k) std::cout << ' ' << index.members(k).size();
  std::cout << "\nindex " << engine.fingerprint() << " written to " << args.out << " (" << secs << " s)\n";
  return kOk;
}

int run_query(const QueryArgs& args) {
  auto engine = Engine::load(args.index);
  if (args.K && *args.K != engine.config().K)
    throw ValidationError("index was built with K=" + std::to_string(engine.config().K));
  if (args.seed && *args.seed != engine.config().seed)
    throw ValidationError("index was built with seed=" + std::to_string(engine.config().seed));

  QuerySpec spec;
  if (!args.paper.empty()) {
    spec.kind = QueryKind::SinglePaper;
    spec.paper_a = args.paper;
  } else if (!args.papers.empty()) {
    spec.kind = QueryKind::TwoPaper;
    auto comma = args.papers.find(',');
    if (comma == std::string::npos) throw ValidationError("--papers expects two ids separated by a comma");
    spec.paper_a = args.papers.substr(0, comma);
    spec.paper_b = args.papers.substr(comma + 1);
  } else if (!args.keyword.empty()) {
    spec.kind = QueryKind::Keyword;
    spec.keyword = args.keyword;
  } else {
    throw ValidationError("one of --paper, --papers or --keyword is required");
  }
  spec.chain_length = args.length;
  spec.r = args.r;
  spec.com_t = args.com_t;
  spec.M = args.M;
  spec.N = args.N;
  spec.beam_width = args.beam;

  auto outcome = engine.query(spec);
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  const auto bytes = export_graph(outcome.graph, args.format);
  if (args.out.empty()) {
    std::cout << bytes;
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!(out << bytes)) throw IoError("cannot write " + args.out);
  }
  return kOk;
}

HttpServer* g_server = nullptr;

int run_serve(const ServeArgs& args) {
  auto engine = Engine::load(args.index);
  Service service(engine);
  std::optional<std::string> static_dir;
  if (!args.static_dir.empty()) static_dir = args.static_dir;
  HttpServer server(service, static_dir);
  const int port = server.bind(args.host, args.port);
  std::cerr << "serving " << args.index << " on http://" << args.host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  server.run();
  g_server = nullptr;
  return kOk;
}

int run_synth(const SynthArgs& args) {
  auto planted = make_planted_corpus(args.spec);
  std::ofstream out(args.out);
  if (!out) throw IoError("cannot write " + args.out);
  write_corpus(out, planted.corpus);
  if (!args.labels.empty()) {
    std::ofstream labels(args.labels);
    if (!labels) throw IoError("cannot write " + args.labels);
    for (std::size_t i = 0; i < planted.labels.size(); ++i)
      labels << planted.corpus.paper(i).id << '\t' << planted.labels[i] << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured retrieval of paper evolution graphs"};
  app.require_subcommand(1);

  IndexArgs ia;
  auto* index = app.add_subcommand("index", "Build an index bundle from a corpus file");
  index->add_option("--corpus", ia.corpus, "Corpus file, one JSON record per line")->required();
  index->add_option("--out", ia.out, "Output bundle directory")->required();
  index->add_option("--k", ia.config.K, "Number of communities")->capture_default_str();
  index->add_option("--seed", ia.config.seed, "Random seed")->capture_default_str();
  index->add_option("--weights", ia.weights, "Relation weights citation,content,authorship (default equal)");
  index->add_option("--max-iters", ia.config.max_iters, "Factorization iteration cap")->capture_default_str();
  index->add_option("--tol", ia.config.tol, "Relative objective change for convergence")->capture_default_str();
  index->add_option("--min-df", ia.config.min_doc_freq, "Minimum document frequency of a term")->capture_default_str();
  index->add_option("--restart", ia.config.restart, "Random-walk restart probability")->capture_default_str();
  index->add_option("--stopwords", ia.stopwords, "Stop-word file, one token per line");
  index->add_flag("--no-symmetrize", ia.no_symmetrize, "Keep the citation relation directed");
  index->add_option("--com-t", ia.config.com_t, "Default community threshold")->capture_default_str();
  index->add_option("--len", ia.config.chain_length, "Default chain length")->capture_default_str();
  index->add_option("--r", ia.config.r, "Default topic smoothness")->capture_default_str();
  index->add_option("--m", ia.config.M, "Default candidates per community")->capture_default_str();
  index->add_option("--n", ia.config.N, "Default keyword candidates")->capture_default_str();
  index->add_option("--beam", ia.config.beam_width, "Default beam width")->capture_default_str();

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Query an index for a paper evolution graph");
  query->add_option("--index", qa.index, "Index bundle directory")->required();
  auto* paper = query->add_option("--paper", qa.paper, "Single query paper id");
  auto* papers = query->add_option("--papers", qa.papers, "Two query paper ids: A,B");
  auto* keyword = query->add_option("--keyword", qa.keyword, "Query keyword text");
  paper->excludes(papers)->excludes(keyword);
  papers->excludes(keyword);
  query->add_option("--format", qa.format, "Output format: json or dot")->check(CLI::IsMember({"json", "dot"}));
  query->add_option("--out", qa.out, "Write the graph to a file instead of stdout");
  query->add_option("--len", qa.length, "Chain length");
  query->add_option("--r", qa.r, "Topic smoothness");
  query->add_option("--com-t", qa.com_t, "Community threshold");
  query->add_option("--m", qa.M, "Candidates per community");
  query->add_option("--n", qa.N, "Keyword candidates");
  query->add_option("--beam", qa.beam, "Beam width");
  query->add_option("--k", qa.K, "Expected K of the index");
  query->add_option("--seed", qa.seed, "Expected seed of the index");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Serve an index over HTTP");
  serve->add_option("--index", sa.index, "Index bundle directory")->required();
  serve->add_option("--host", sa.host, "Bind address")->capture_default_str();
  serve->add_option("--port", sa.port, "Port")->capture_default_str();
  serve->add_option("--static", sa.static_dir, "Explorer assets directory, served under /ui");

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Write a planted-community corpus");
  synth->add_option("--out", ya.out, "Corpus file to write")->required();
  synth->add_option("--labels", ya.labels, "Also write planted labels (id<TAB>block)");
  synth->add_option("--papers", ya.spec.papers)->capture_default_str();
  synth->add_option("--communities", ya.spec.communities)->capture_default_str();
  synth->add_option("--words", ya.spec.words)->capture_default_str();
  synth->add_option("--authors", ya.spec.authors)->capture_default_str();
  synth->add_option("--p-in", ya.spec.p_in)->capture_default_str();
  synth->add_option("--p-out", ya.spec.p_out)->capture_default_str();
  synth->add_option("--seed", ya.spec.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*index) return run_index(ia);
    if (*query) return run_query(qa);
    if (*serve) return run_serve(sa);
    if (*synth) return run_synth(ya);
  } catch (const QueryError& e) {
    std::cerr << "query failed: " << e.what() << "\n";
    return kQuery;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
