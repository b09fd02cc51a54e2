#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace evochain {

using StopWords = std::unordered_set<std::string>;

// Porter (1980) suffix-stripping stemmer. Input is expected lowercase ASCII;
// words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

// Lowercased runs of ASCII letters and digits. Tokens shorter than two
// characters and purely numeric tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

// tokenize + stop-word removal + stemming.
std::vector<std::string> analyze(std::string_view text, const StopWords& stopwords);

// Standard English stop-word list compiled into the library.
const StopWords& default_stopwords();

// One token per line; blank lines and lines starting with '#' are skipped.
StopWords load_stopwords(const std::string& path);

}  // namespace evochain
