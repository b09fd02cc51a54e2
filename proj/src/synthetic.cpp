#include "evochain/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "evochain/errors.hpp"
#include "evochain/text.hpp"

namespace evochain {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

// Pronounceable tokens from letters the stemmer never strips.
std::vector<std::string> make_words(int count, std::mt19937_64& rng) {
  static constexpr char kCons[] = "bdfgkmpv";
  static constexpr char kVowels[] = "ao";
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto& stop = default_stopwords();
  while (static_cast<int>(out.size()) < count) {
    std::string w;
    for (int s = 0; s < 3; ++s) {
      w += kCons[below(rng, 8)];
      w += kVowels[below(rng, 2)];
    }
    if (stop.contains(w) || porter_stem(w) != w || !seen.insert(w).second) continue;
    out.push_back(w);
  }
  return out;
}

int block_of(int item, int items, int blocks) {
  return std::min(blocks - 1, item * blocks / items);
}

}  // namespace

PlantedCorpus make_planted_corpus(const PlantedCorpusSpec& spec) {
  if (spec.papers < 1 || spec.communities < 1 || spec.words < spec.communities || spec.authors < spec.communities)
    throw ValidationError("planted corpus needs at least one word and author per community");
  std::mt19937_64 rng(spec.seed);
  const auto words = make_words(spec.words, rng);

  std::vector<PaperRecord> papers(static_cast<std::size_t>(spec.papers));
  PlantedCorpus out;
  out.labels.resize(papers.size());
  for (int i = 0; i < spec.papers; ++i) {
    auto& p = papers[static_cast<std::size_t>(i)];
    char id[16];
    std::snprintf(id, sizeof id, "P%04d", i + 1);
    p.id = id;
    p.venue = "Synthetic";
    p.year = spec.first_year + static_cast<int>(below(rng, static_cast<std::size_t>(spec.last_year - spec.first_year + 1)));
    out.labels[static_cast<std::size_t>(i)] = i % spec.communities;
  }

  for (int i = 0; i < spec.papers; ++i) {
    auto& p = papers[static_cast<std::size_t>(i)];
    const int block = out.labels[static_cast<std::size_t>(i)];

    std::vector<std::string> used;
    for (int w = 0; w < spec.words; ++w) {
      const double prob = block_of(w, spec.words, spec.communities) == block ? spec.p_in : spec.p_out;
      if (uniform01(rng) < prob) used.push_back(words[static_cast<std::size_t>(w)]);
    }
    while (used.size() < 3) {
      int w = static_cast<int>(below(rng, static_cast<std::size_t>(spec.words)));
      if (block_of(w, spec.words, spec.communities) == block) used.push_back(words[static_cast<std::size_t>(w)]);
    }
    std::string title;
    for (std::size_t k = 0; k < 3; ++k) {
      std::string w = used[k];
      w[0] = static_cast<char>(w[0] - 'a' + 'A');
      title += (k ? " " : "") + w;
    }
    p.title = title;
    for (const auto& w : used) {
      const int repeats = 1 + static_cast<int>(below(rng, 3));
      for (int r = 0; r < repeats; ++r) p.abstract += (p.abstract.empty() ? "" : " ") + w;
    }

    for (int a = 0; a < spec.authors; ++a) {
      const double prob = block_of(a, spec.authors, spec.communities) == block ? spec.p_in : spec.p_out;
      if (uniform01(rng) < prob) p.authors.push_back("Author " + std::to_string(a + 1));
    }
    while (p.authors.empty()) {
      int a = static_cast<int>(below(rng, static_cast<std::size_t>(spec.authors)));
      if (block_of(a, spec.authors, spec.communities) == block) p.authors.push_back("Author " + std::to_string(a + 1));
    }
  }

  // Citations point to earlier papers in (year, id) order.
  for (int i = 0; i < spec.papers; ++i) {
    auto& p = papers[static_cast<std::size_t>(i)];
    for (int j = 0; j < spec.papers; ++j) {
      const auto& q = papers[static_cast<std::size_t>(j)];
      if (!(q.year < p.year || (q.year == p.year && q.id < p.id))) continue;
      const bool same = out.labels[static_cast<std::size_t>(i)] == out.labels[static_cast<std::size_t>(j)];
      if (uniform01(rng) < (same ? spec.p_in : spec.p_out)) p.cites.push_back(q.id);
    }
  }
  out.corpus = Corpus(std::move(papers));
  return out;
}

}  // namespace evochain
