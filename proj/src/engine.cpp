#include "evochain/engine.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

#include "evochain/errors.hpp"

namespace evochain {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_double(double v) {
  std::ostringstream s;
  s << std::hexfloat << v;
  return s.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << data;
  if (!out.flush()) throw IoError("cannot write " + path.string());
}

EngineConfig config_from_json(const nlohmann::json& j) {
  EngineConfig c;
  c.K = j.at("K").get<int>();
  auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != 3) throw ParseError("index manifest: weights must have three entries");
  c.weights = {w[0], w[1], w[2]};
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_iters = j.at("max_iters").get<int>();
  c.tol = j.at("tol").get<double>();
  c.min_doc_freq = j.at("min_doc_freq").get<int>();
  c.symmetrize_citation = j.at("symmetrize_citation").get<bool>();
  c.restart = j.at("restart").get<double>();
  c.com_t = j.at("com_t").get<double>();
  c.chain_length = j.at("chain_length").get<int>();
  c.M = j.at("M").get<std::size_t>();
  c.N = j.at("N").get<std::size_t>();
  c.r = j.at("r").get<double>();
  c.beam_width = j.at("beam_width").get<std::size_t>();
  c.validate();
  return c;
}

}  // namespace

Engine Engine::build(Corpus corpus, const EngineConfig& config, StopWords stopwords) {
  config.validate();
  Engine e;
  e.config_ = std::make_shared<const EngineConfig>(config);
  e.stopwords_ = std::make_shared<const StopWords>(std::move(stopwords));
  e.corpus_ = std::make_shared<const Corpus>(std::move(corpus));
  e.vocab_ = std::make_shared<const Vocabulary>(build_vocabulary(*e.corpus_, *e.stopwords_, config.min_doc_freq));
  e.relations_ = std::make_shared<const RelationSet>(
      build_relations(*e.corpus_, *e.vocab_, *e.stopwords_, config.symmetrize_citation));
  FactorizeOptions opts;
  opts.K = config.K;
  opts.weights = config.weights;
  opts.seed = config.seed;
  opts.max_iters = config.max_iters;
  opts.tol = config.tol;
  e.model_ = std::make_shared<const MetaFacModel>(factorize(*e.relations_, opts));
  e.finish();
  return e;
}

void Engine::finish() {
  graph_ = std::make_shared<const BipartiteWalkGraph>(build_walk_graph(relations_->content, config_->restart));
  influence_ = std::make_shared<const InfluenceCalculator>(*graph_);
}

QueryContext Engine::context() const {
  return {*corpus_, *vocab_, *stopwords_, *relations_, *model_, *influence_, *config_};
}

QueryOutcome Engine::query(const QuerySpec& spec) const {
  return run_query(spec, context());
}

ordered_json Engine::config_json() const {
  const auto& c = *config_;
  ordered_json j;
  j["K"] = c.K;
  j["weights"] = {c.weights[0], c.weights[1], c.weights[2]};
  j["seed"] = c.seed;
  j["max_iters"] = c.max_iters;
  j["tol"] = c.tol;
  j["min_doc_freq"] = c.min_doc_freq;
  j["symmetrize_citation"] = c.symmetrize_citation;
  j["restart"] = c.restart;
  j["com_t"] = c.com_t;
  j["chain_length"] = c.chain_length;
  j["M"] = c.M;
  j["N"] = c.N;
  j["r"] = c.r;
  j["beam_width"] = c.beam_width;
  return j;
}

std::string Engine::fingerprint() const {
  const auto& c = *config_;
  std::ostringstream s;
  s << "K=" << c.K << ";w=" << hex_double(c.weights[0]) << ',' << hex_double(c.weights[1]) << ','
    << hex_double(c.weights[2]) << ";seed=" << c.seed << ";iters=" << c.max_iters << ";tol=" << hex_double(c.tol)
    << ";mdf=" << c.min_doc_freq << ";sym=" << c.symmetrize_citation << ";restart=" << hex_double(c.restart) << ';';
  std::ostringstream corpus;
  write_corpus(corpus, *corpus_);
  std::uint64_t h = fnv1a(s.str());
  h = fnv1a(corpus.str(), h);
  std::vector<std::string> words(stopwords_->begin(), stopwords_->end());
  std::sort(words.begin(), words.end());
  for (const auto& w : words) h = fnv1a(w + "\n", h);
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

void Engine::save(const std::string& dir) const {
  fs::path final_path = fs::path(dir).lexically_normal();
  if (final_path.filename().empty()) final_path = final_path.parent_path();
  fs::path tmp = final_path;
  tmp += ".partial-" + std::to_string(::getpid());
  std::error_code ec;
  if (final_path.has_parent_path()) fs::create_directories(final_path.parent_path(), ec);
  fs::remove_all(tmp, ec);
  try {
    if (!fs::create_directories(tmp)) throw IoError("cannot create " + tmp.string());

    std::ostringstream corpus;
    write_corpus(corpus, *corpus_);
    write_file(tmp / "corpus.jsonl", corpus.str());

    std::vector<std::string> words(stopwords_->begin(), stopwords_->end());
    std::sort(words.begin(), words.end());
    std::string sw;
    for (const auto& w : words) sw += w + "\n";
    write_file(tmp / "stopwords.txt", sw);

    std::string vocab;
    for (std::size_t w = 0; w < vocab_->size(); ++w)
      vocab += vocab_->term(w) + "\t" + std::to_string(vocab_->doc_freq(w)) + "\n";
    write_file(tmp / "vocabulary.tsv", vocab);

    std::ostringstream model;
    save_model(model, *model_);
    write_file(tmp / "model.txt", model.str());

    ordered_json manifest;
    manifest["format"] = "evochain-index";
    manifest["version"] = kIndexVersion;
    manifest["fingerprint"] = fingerprint();
    manifest["config"] = config_json();
    manifest["papers"] = corpus_->size();
    manifest["vocabulary"] = vocab_->size();
    manifest["authors"] = relations_->authors.size();
    manifest["relations"] = {{"citation_nnz", relations_->citation.nonZeros()},
                             {"content_nnz", relations_->content.nonZeros()},
                             {"authorship_nnz", relations_->authorship.nonZeros()},
                             {"dangling_citations", relations_->dangling_citations}};
    const auto& trace = model_->objective_trace;
    manifest["objective"] = {{"iterations", trace.empty() ? 0 : trace.size() - 1},
                             {"initial", trace.empty() ? 0.0 : trace.front()},
                             {"final", trace.empty() ? 0.0 : trace.back()}};
    write_file(tmp / "manifest.json", manifest.dump(2) + "\n");

    fs::remove_all(final_path, ec);
    fs::rename(tmp, final_path);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(tmp, ec);
    throw IoError(e.what());
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

Engine Engine::load(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw IoError("index bundle not found: " + dir);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(root / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("index manifest: ") + e.what());
  }
  if (manifest.value("format", "") != "evochain-index" || manifest.value("version", 0) != kIndexVersion)
    throw ValidationError("unsupported index bundle in " + dir);

  Engine e;
  try {
    e.config_ = std::make_shared<const EngineConfig>(config_from_json(manifest.at("config")));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("index manifest: ") + ex.what());
  }
  e.stopwords_ = std::make_shared<const StopWords>(load_stopwords((root / "stopwords.txt").string()));
  e.corpus_ = std::make_shared<const Corpus>(load_corpus((root / "corpus.jsonl").string()));

  std::istringstream vin(read_file(root / "vocabulary.tsv"));
  std::vector<std::string> terms;
  std::vector<int> freqs;
  std::string line;
  while (std::getline(vin, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("vocabulary.tsv: missing tab in '" + line + "'");
    terms.push_back(line.substr(0, tab));
    freqs.push_back(std::stoi(line.substr(tab + 1)));
  }
  e.vocab_ = std::make_shared<const Vocabulary>(std::move(terms), std::move(freqs), e.corpus_->size());
  e.relations_ = std::make_shared<const RelationSet>(
      build_relations(*e.corpus_, *e.vocab_, *e.stopwords_, e.config_->symmetrize_citation));

  std::istringstream min(read_file(root / "model.txt"));
  e.model_ = std::make_shared<const MetaFacModel>(load_model(min));

  if (e.fingerprint() != manifest.value("fingerprint", ""))
    throw ValidationError("index bundle fingerprint mismatch in " + dir);
  const auto& m = *e.model_;
  if (m.U1.rows() != static_cast<Eigen::Index>(e.corpus_->size()) ||
      m.U2.rows() != static_cast<Eigen::Index>(e.vocab_->size()) ||
      m.U3.rows() != static_cast<Eigen::Index>(e.relations_->authors.size()))
    throw ValidationError("index bundle model does not match its corpus");
  e.finish();
  return e;
}

}  // namespace evochain
