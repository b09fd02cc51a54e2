#include "evochain/config.hpp"

#include <cmath>
#include <sstream>

#include "evochain/errors.hpp"

namespace evochain {

void EngineConfig::validate() const {
  if (K < 1) throw ValidationError("K must be at least 1");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("weights must sum to 1");
  if (max_iters < 1) throw ValidationError("max_iters must be positive");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (min_doc_freq < 1) throw ValidationError("min_doc_freq must be at least 1");
  if (!(restart > 0.0 && restart < 1.0)) throw ValidationError("restart must lie in (0, 1)");
  if (!(com_t > 0.0 && com_t <= 1.0)) throw ValidationError("com_t must lie in (0, 1]");
  if (chain_length < 2) throw ValidationError("chain_length must be at least 2");
  if (M < 1) throw ValidationError("M must be positive");
  if (N < 1) throw ValidationError("N must be positive");
  if (!(r >= 0.0)) throw ValidationError("r must be nonnegative");
  if (beam_width < 1) throw ValidationError("beam_width must be positive");
}

RelationWeights parse_weights(const std::string& text) {
  RelationWeights w{};
  std::stringstream ss(text);
  std::string part;
  std::size_t n = 0;
  while (std::getline(ss, part, ',')) {
    if (n == 3) throw ValidationError("expected three comma-separated weights");
    try {
      std::size_t used = 0;
      w[n] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ValidationError("bad weight '" + part + "'");
    }
    ++n;
  }
  if (n != 3) throw ValidationError("expected three comma-separated weights");
  return w;
}

}  // namespace evochain
