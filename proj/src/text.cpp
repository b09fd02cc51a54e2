#include "evochain/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "evochain/errors.hpp"

namespace evochain {

namespace {

constexpr std::string_view kStopWords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below", "between",
    "both", "but", "by", "can", "cannot", "could", "couldn", "did", "didn", "do", "does", "doesn",
    "doing", "don", "down", "during", "each", "etc", "few", "for", "from", "further", "had",
    "hadn", "has", "hasn", "have", "haven", "having", "he", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "however", "i", "if", "in", "into", "is", "isn", "it", "its",
    "itself", "just", "ll", "me", "might", "more", "most", "must", "mustn", "my", "myself", "no",
    "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
    "ourselves", "out", "over", "own", "same", "shall", "shan", "she", "should", "shouldn", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "through", "thus", "to", "too", "under", "until",
    "up", "us", "ve", "very", "via", "was", "wasn", "we", "were", "weren", "what", "when",
    "where", "whether", "which", "while", "who", "whom", "why", "will", "with", "within",
    "without", "won", "would", "wouldn", "yet", "you", "your", "yours", "yourself",
    "yourselves", "based", "using", "used", "use", "paper", "propose", "proposed", "present",
    "presented", "show", "shows", "shown", "new", "one", "two", "well", "may", "many", "much",
    "several", "since", "among", "per"};

}  // namespace

const StopWords& default_stopwords() {
  static const StopWords words = [] {
    StopWords s;
    for (auto w : kStopWords) s.emplace(w);
    return s;
  }();
  return words;
}

StopWords load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stop-word file: " + path);
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string token = line.substr(first, last - first + 1);
    std::transform(token.begin(), token.end(), token.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(std::move(token));
  }
  return words;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 &&
        !std::all_of(current.begin(), current.end(), [](char c) { return c >= '0' && c <= '9'; }))
      tokens.push_back(current);
    current.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) && c < 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> analyze(std::string_view text, const StopWords& stopwords) {
  std::vector<std::string> out;
  for (auto& token : tokenize(text)) {
    if (stopwords.contains(token)) continue;
    auto stem = porter_stem(token);
    if (stem.size() < 2 || stopwords.contains(stem)) continue;
    out.push_back(std::move(stem));
  }
  return out;
}

}  // namespace evochain
