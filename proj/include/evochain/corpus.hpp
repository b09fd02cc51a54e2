#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evochain/text.hpp"

namespace evochain {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct PaperRecord {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<std::string> keywords;
  std::vector<std::string> authors;
  int year = 0;
  std::string venue;
  std::vector<std::string> cites;
};

struct DanglingCitation {
  std::string paper;
  std::string cited;
};

struct DroppedRecord {
  std::size_t ordinal;  // 1-based line-record number
  std::string reason;
};

struct LoadReport {
  std::vector<DanglingCitation> dangling;
  std::vector<DroppedRecord> dropped;

  bool empty() const { return dangling.empty() && dropped.empty(); }
};

class Corpus {
 public:
  Corpus() = default;
  // Validates ids (nonempty, unique) and years; computes the dangling report.
  explicit Corpus(std::vector<PaperRecord> papers, std::vector<DroppedRecord> dropped = {});

  std::size_t size() const { return papers_.size(); }
  const std::vector<PaperRecord>& papers() const { return papers_; }
  const PaperRecord& paper(std::size_t i) const { return papers_.at(i); }
  std::optional<std::size_t> find(const std::string& id) const;
  // Throws LookupError for unknown ids.
  std::size_t index_of(const std::string& id) const;
  const LoadReport& report() const { return report_; }

  // True when paper a precedes paper b in the (year, id) total order.
  bool precedes(std::size_t a, std::size_t b) const;

 private:
  std::vector<PaperRecord> papers_;
  std::unordered_map<std::string, std::size_t> index_;
  LoadReport report_;
};

Corpus load_corpus(const std::string& path);
Corpus parse_corpus(std::istream& in);
void write_corpus(std::ostream& out, const Corpus& corpus);

// Stemmed term counts of title + keywords + abstract.
using TermCounts = std::map<std::string, int>;
TermCounts count_terms(const PaperRecord& paper, const StopWords& stopwords);

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<int> doc_freq, std::size_t num_papers);

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::string& term(std::size_t w) const { return terms_.at(w); }
  int doc_freq(std::size_t w) const { return doc_freq_.at(w); }
  const std::vector<int>& doc_freqs() const { return doc_freq_; }
  std::size_t num_papers() const { return num_papers_; }
  std::optional<std::size_t> find(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<int> doc_freq_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t num_papers_ = 0;
};

Vocabulary build_vocabulary(const Corpus& corpus, const StopWords& stopwords, int min_doc_freq = 2);

// tf * ln(num_papers / df).
double tfidf(int tf, std::size_t num_papers, int doc_freq);
// Throws LookupError when `term` is not in the vocabulary.
double tfidf_weight(const std::string& term, const TermCounts& paper_terms, const Vocabulary& vocab);

struct RelationSet {
  SparseMatrix citation;    // P x P
  SparseMatrix content;     // P x W
  SparseMatrix authorship;  // P x A
  std::vector<std::string> authors;
  std::unordered_map<std::string, std::size_t> author_index;
  std::size_t dangling_citations = 0;
};

RelationSet build_relations(const Corpus& corpus, const Vocabulary& vocab,
                            const StopWords& stopwords, bool symmetrize_citation = true);

}  // namespace evochain
