#include "evochain/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <set>

#include "evochain/errors.hpp"

namespace evochain {

using nlohmann::json;

Corpus::Corpus(std::vector<PaperRecord> papers, std::vector<DroppedRecord> dropped)
    : papers_(std::move(papers)) {
  report_.dropped = std::move(dropped);
  if (papers_.empty()) throw ValidationError("empty corpus");
  for (std::size_t i = 0; i < papers_.size(); ++i) {
    const auto& p = papers_[i];
    if (p.id.empty()) throw ValidationError("paper at position " + std::to_string(i + 1) + " has an empty id");
    if (p.year < 1800 || p.year > 2200)
      throw ValidationError("paper " + p.id + " has year " + std::to_string(p.year) + " outside [1800, 2200]");
    if (!index_.emplace(p.id, i).second) throw ValidationError("duplicate paper id: " + p.id);
  }
  for (const auto& p : papers_)
    for (const auto& c : p.cites)
      if (!index_.contains(c)) report_.dangling.push_back({p.id, c});
}

std::optional<std::size_t> Corpus::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::index_of(const std::string& id) const {
  auto i = find(id);
  if (!i) throw LookupError("unknown paper id: " + id);
  return *i;
}

bool Corpus::precedes(std::size_t a, std::size_t b) const {
  const auto& pa = papers_[a];
  const auto& pb = papers_[b];
  if (pa.year != pb.year) return pa.year < pb.year;
  return pa.id < pb.id;
}

namespace {

std::vector<std::string> string_list(const json& record, const char* field, std::size_t ordinal) {
  std::vector<std::string> out;
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return out;
  if (!it->is_array())
    throw ParseError("record " + std::to_string(ordinal) + ": field '" + field + "' must be an array");
  for (const auto& v : *it) {
    if (!v.is_string())
      throw ParseError("record " + std::to_string(ordinal) + ": field '" + field + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string string_field(const json& record, const char* field, std::size_t ordinal) {
  auto it = record.find(field);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_string())
    throw ParseError("record " + std::to_string(ordinal) + ": field '" + field + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
  std::vector<PaperRecord> papers;
  std::vector<DroppedRecord> dropped;
  std::string line;
  std::size_t ordinal = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++ordinal;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("record " + std::to_string(ordinal) + ": malformed JSON (" + e.what() + ")");
    }
    if (!record.is_object()) throw ParseError("record " + std::to_string(ordinal) + ": not an object");

    PaperRecord p;
    p.id = string_field(record, "id", ordinal);
    p.title = string_field(record, "title", ordinal);
    auto year = record.find("year");
    if (p.id.empty() || p.title.empty() || year == record.end() || year->is_null()) {
      const char* missing = p.id.empty() ? "id" : p.title.empty() ? "title" : "year";
      dropped.push_back({ordinal, std::string("missing mandatory field '") + missing + "'"});
      continue;
    }
    if (!year->is_number_integer())
      throw ParseError("record " + std::to_string(ordinal) + ": field 'year' must be an integer");
    p.year = year->get<int>();
    p.abstract = string_field(record, "abstract", ordinal);
    p.venue = string_field(record, "venue", ordinal);
    p.keywords = string_list(record, "keywords", ordinal);
    p.authors = string_list(record, "authors", ordinal);
    p.cites = string_list(record, "cites", ordinal);
    papers.push_back(std::move(p));
  }
  return Corpus(std::move(papers), std::move(dropped));
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus file: " + path);
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& p : corpus.papers()) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["abstract"] = p.abstract;
    j["keywords"] = p.keywords;
    j["authors"] = p.authors;
    j["year"] = p.year;
    j["venue"] = p.venue;
    j["cites"] = p.cites;
    out << j.dump() << '\n';
  }
}

TermCounts count_terms(const PaperRecord& paper, const StopWords& stopwords) {
  TermCounts counts;
  auto add = [&](std::string_view text) {
    for (auto& stem : analyze(text, stopwords)) ++counts[stem];
  };
  add(paper.title);
  for (const auto& k : paper.keywords) add(k);
  add(paper.abstract);
  return counts;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<int> doc_freq, std::size_t num_papers)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), num_papers_(num_papers) {
  if (terms_.size() != doc_freq_.size()) throw ValidationError("vocabulary terms/doc_freq size mismatch");
  for (std::size_t w = 0; w < terms_.size(); ++w) {
    if (doc_freq_[w] <= 0) throw ValidationError("vocabulary term '" + terms_[w] + "' has zero doc_freq");
    if (!index_.emplace(terms_[w], w).second) throw ValidationError("duplicate vocabulary term: " + terms_[w]);
  }
}

std::optional<std::size_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const Corpus& corpus, const StopWords& stopwords, int min_doc_freq) {
  if (corpus.size() == 0) throw ValidationError("empty corpus");
  std::map<std::string, int> df;
  for (const auto& p : corpus.papers())
    for (const auto& [term, count] : count_terms(p, stopwords)) ++df[term];

  std::vector<std::string> terms;
  std::vector<int> freqs;
  for (const auto& [term, f] : df) {
    if (f < min_doc_freq) continue;
    terms.push_back(term);
    freqs.push_back(f);
  }
  if (terms.empty()) throw ValidationError("empty vocabulary");
  return Vocabulary(std::move(terms), std::move(freqs), corpus.size());
}

double tfidf(int tf, std::size_t num_papers, int doc_freq) {
  if (tf <= 0 || doc_freq <= 0) return 0.0;
  return tf * std::log(static_cast<double>(num_papers) / doc_freq);
}

double tfidf_weight(const std::string& term, const TermCounts& paper_terms, const Vocabulary& vocab) {
  auto w = vocab.find(term);
  if (!w) throw LookupError("term not in vocabulary: " + term);
  auto it = paper_terms.find(term);
  int tf = it == paper_terms.end() ? 0 : it->second;
  return tfidf(tf, vocab.num_papers(), vocab.doc_freq(*w));
}

RelationSet build_relations(const Corpus& corpus, const Vocabulary& vocab, const StopWords& stopwords,
                            bool symmetrize_citation) {
  const auto n = static_cast<Eigen::Index>(corpus.size());
  using Triplet = Eigen::Triplet<double>;
  RelationSet rel;

  std::vector<Triplet> content;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto& [term, count] : count_terms(corpus.paper(i), stopwords)) {
      auto w = vocab.find(term);
      if (!w) continue;
      double weight = tfidf(count, vocab.num_papers(), vocab.doc_freq(*w));
      if (weight > 0.0) content.emplace_back(static_cast<int>(i), static_cast<int>(*w), weight);
    }
  }
  rel.content.resize(n, static_cast<Eigen::Index>(vocab.size()));
  rel.content.setFromTriplets(content.begin(), content.end());

  std::set<std::string> names;
  for (const auto& p : corpus.papers()) names.insert(p.authors.begin(), p.authors.end());
  rel.authors.assign(names.begin(), names.end());
  for (std::size_t a = 0; a < rel.authors.size(); ++a) rel.author_index.emplace(rel.authors[a], a);

  std::vector<Triplet> authorship;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::set<std::size_t> cols;
    for (const auto& a : corpus.paper(i).authors) cols.insert(rel.author_index.at(a));
    for (auto a : cols) authorship.emplace_back(static_cast<int>(i), static_cast<int>(a), 1.0);
  }
  rel.authorship.resize(n, static_cast<Eigen::Index>(rel.authors.size()));
  rel.authorship.setFromTriplets(authorship.begin(), authorship.end());

  std::set<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const auto& c : corpus.paper(i).cites) {
      auto j = corpus.find(c);
      if (!j) {
        ++rel.dangling_citations;
        continue;
      }
      if (*j == i) continue;
      links.emplace(i, *j);
      if (symmetrize_citation) links.emplace(*j, i);
    }
  }
  std::vector<Triplet> citation;
  for (auto [i, j] : links) citation.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
  rel.citation.resize(n, n);
  rel.citation.setFromTriplets(citation.begin(), citation.end());
  return rel;
}

}  // namespace evochain
