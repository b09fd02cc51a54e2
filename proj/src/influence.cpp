#include "evochain/influence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evochain/errors.hpp"

namespace evochain {

namespace {

SparseMatrix row_normalized(const SparseMatrix& m) {
  SparseMatrix out = m;
  for (Eigen::Index i = 0; i < out.outerSize(); ++i) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(out, i); it; ++it) s += it.value();
    if (s <= 0.0) continue;
    for (SparseMatrix::InnerIterator it(out, i); it; ++it) it.valueRef() /= s;
  }
  return out;
}

double l1_change(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

[[noreturn]] void non_convergence(double residual) {
  throw NumericError("random walk did not converge (L1 residual " + std::to_string(residual) + ")");
}

}  // namespace

BipartiteWalkGraph build_walk_graph(const SparseMatrix& content, double restart) {
  if (!(restart > 0.0 && restart < 1.0)) throw ValidationError("restart probability must lie in (0, 1)");
  if (content.rows() == 0 || content.cols() == 0 || content.nonZeros() == 0)
    throw ValidationError("content relation is empty");
  BipartiteWalkGraph g;
  g.restart = restart;
  SparseMatrix pruned = content.pruned(0.0);
  g.paper_to_word = row_normalized(pruned);
  g.paper_to_word.makeCompressed();
  SparseMatrix transposed = pruned.transpose();
  g.word_to_paper = row_normalized(transposed);
  g.word_to_paper.makeCompressed();
  g.dangling.assign(g.num_papers(), false);
  for (Eigen::Index p = 0; p < g.paper_to_word.outerSize(); ++p)
    if (g.paper_to_word.outerIndexPtr()[p + 1] == g.paper_to_word.outerIndexPtr()[p])
      g.dangling[static_cast<std::size_t>(p)] = true;
  return g;
}

std::vector<double> walk_state(const BipartiteWalkGraph& g, std::size_t start,
                               std::optional<std::size_t> blocked_word, const WalkOptions& opts) {
  const std::size_t P = g.num_papers();
  const std::size_t W = g.num_words();
  if (start >= P) throw LookupError("walk start out of range");
  const double a = g.restart;
  const double b = 1.0 - a;
  std::vector<double> x(P + W, 0.0);
  std::vector<double> next(P + W);
  x[start] = 1.0;
  double residual = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    next[start] = a;
    for (std::size_t p = 0; p < P; ++p) {
      const double mass = x[p];
      if (mass == 0.0) continue;
      if (g.dangling[p]) {
        next[start] += b * mass;
        continue;
      }
      for (SparseMatrix::InnerIterator e(g.paper_to_word, static_cast<Eigen::Index>(p)); e; ++e)
        next[P + static_cast<std::size_t>(e.col())] += b * mass * e.value();
    }
    for (std::size_t w = 0; w < W; ++w) {
      const double mass = x[P + w];
      if (mass == 0.0 || (blocked_word && *blocked_word == w)) continue;
      for (SparseMatrix::InnerIterator e(g.word_to_paper, static_cast<Eigen::Index>(w)); e; ++e)
        next[static_cast<std::size_t>(e.col())] += b * mass * e.value();
    }
    residual = l1_change(next, x);
    x.swap(next);
    if (residual < opts.tol) return x;
  }
  non_convergence(residual);
}

std::vector<double> visit_probabilities(const BipartiteWalkGraph& g, std::size_t start,
                                        std::optional<std::size_t> blocked_word, const WalkOptions& opts) {
  const std::size_t P = g.num_papers();
  auto base = walk_state(g, start, std::nullopt, opts);
  double z = 0.0;
  for (std::size_t p = 0; p < P; ++p) z += base[p];
  std::vector<double> out(P);
  if (blocked_word) {
    auto blocked = walk_state(g, start, blocked_word, opts);
    for (std::size_t p = 0; p < P; ++p) out[p] = blocked[p] / z;
  } else {
    for (std::size_t p = 0; p < P; ++p) out[p] = base[p] / z;
  }
  return out;
}

double InfluenceProfile::at(std::size_t word) const {
  auto it = std::lower_bound(per_word.begin(), per_word.end(), std::make_pair(word, -HUGE_VAL));
  return it != per_word.end() && it->first == word ? it->second : 0.0;
}

std::vector<double> InfluenceProfile::dense() const {
  std::vector<double> v(dimension, 0.0);
  for (auto [w, x] : per_word) v[w] = x;
  return v;
}

InfluenceProfile word_influence_vector(const BipartiteWalkGraph& g, std::size_t source, std::size_t target,
                                       const WalkOptions& opts) {
  const std::size_t P = g.num_papers();
  if (target >= P) throw LookupError("influence target out of range");
  auto base = walk_state(g, source, std::nullopt, opts);
  double z = 0.0;
  for (std::size_t p = 0; p < P; ++p) z += base[p];
  InfluenceProfile prof{source, target, g.num_words(), {}};
  for (std::size_t w = 0; w < g.num_words(); ++w) {
    if (base[P + w] == 0.0) continue;
    auto blocked = walk_state(g, source, w, opts);
    const double v = (base[target] - blocked[target]) / z;
    if (v != 0.0) prof.per_word.emplace_back(w, v);
  }
  return prof;
}

double topic_similarity(const InfluenceProfile& profile, std::span<const double> topic) {
  if (topic.size() != profile.dimension)
    throw ValidationError("topic has " + std::to_string(topic.size()) + " weights, vocabulary has " +
                          std::to_string(profile.dimension));
  double sum = 0.0;
  for (double t : topic) {
    if (!(t >= 0.0)) throw ValidationError("topic weights must be nonnegative");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("topic weights must sum to 1");
  double s = 0.0;
  for (auto [w, x] : profile.per_word) s += topic[w] * x;
  return s;
}

InfluenceCalculator::InfluenceCalculator(const BipartiteWalkGraph& graph, WalkOptions opts)
    : graph_(graph), opts_(opts) {}

// x <- rhs + b * T x (or T^T x), where T is the restart-free bipartite step
// with dangling papers emitting nothing.
std::vector<double> InfluenceCalculator::solve(std::span<const double> rhs, bool adjoint) const {
  const auto& g = graph_;
  const std::size_t P = g.num_papers();
  const std::size_t W = g.num_words();
  const double b = 1.0 - g.restart;
  std::vector<double> x(rhs.begin(), rhs.end());
  std::vector<double> next(P + W);
  double residual = 0.0;
  for (int it = 0; it < opts_.max_iters; ++it) {
    std::copy(rhs.begin(), rhs.end(), next.begin());
    if (!adjoint) {
      for (std::size_t p = 0; p < P; ++p) {
        if (x[p] == 0.0 || g.dangling[p]) continue;
        for (SparseMatrix::InnerIterator e(g.paper_to_word, static_cast<Eigen::Index>(p)); e; ++e)
          next[P + static_cast<std::size_t>(e.col())] += b * x[p] * e.value();
      }
      for (std::size_t w = 0; w < W; ++w) {
        if (x[P + w] == 0.0) continue;
        for (SparseMatrix::InnerIterator e(g.word_to_paper, static_cast<Eigen::Index>(w)); e; ++e)
          next[static_cast<std::size_t>(e.col())] += b * x[P + w] * e.value();
      }
    } else {
      for (std::size_t p = 0; p < P; ++p) {
        if (g.dangling[p]) continue;
        double s = 0.0;
        for (SparseMatrix::InnerIterator e(g.paper_to_word, static_cast<Eigen::Index>(p)); e; ++e)
          s += e.value() * x[P + static_cast<std::size_t>(e.col())];
        next[p] += b * s;
      }
      for (std::size_t w = 0; w < W; ++w) next[P + w] += b * word_out(x, w);
    }
    residual = l1_change(next, x);
    x.swap(next);
    if (residual < opts_.tol) return x;
  }
  non_convergence(residual);
}

// sum_p W2P(w, p) y[p]
double InfluenceCalculator::word_out(std::span<const double> y, std::size_t word) const {
  double s = 0.0;
  for (SparseMatrix::InnerIterator e(graph_.word_to_paper, static_cast<Eigen::Index>(word)); e; ++e)
    s += e.value() * y[static_cast<std::size_t>(e.col())];
  return s;
}

InfluenceCalculator::Vec InfluenceCalculator::forward_solve(std::size_t source) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = forward_.find(source); it != forward_.end()) return it->second;
  }
  std::vector<double> rhs(graph_.num_papers() + graph_.num_words(), 0.0);
  rhs[source] = 1.0;
  auto v = std::make_shared<const std::vector<double>>(solve(rhs, false));
  std::lock_guard lock(mutex_);
  return forward_.emplace(source, v).first->second;
}

InfluenceCalculator::Vec InfluenceCalculator::adjoint_solve(std::size_t node) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = adjoint_.find(node); it != adjoint_.end()) return it->second;
  }
  std::vector<double> rhs(graph_.num_papers() + graph_.num_words(), 0.0);
  rhs[node] = 1.0;
  auto v = std::make_shared<const std::vector<double>>(solve(rhs, true));
  std::lock_guard lock(mutex_);
  return adjoint_.emplace(node, v).first->second;
}

InfluenceCalculator::Vec InfluenceCalculator::dangling_adjoint() const {
  {
    std::lock_guard lock(mutex_);
    if (dangling_) return dangling_;
  }
  std::vector<double> rhs(graph_.num_papers() + graph_.num_words(), 0.0);
  for (std::size_t p = 0; p < graph_.num_papers(); ++p) rhs[p] = graph_.dangling[p] ? 1.0 : 0.0;
  auto v = std::make_shared<const std::vector<double>>(solve(rhs, true));
  std::lock_guard lock(mutex_);
  if (!dangling_) dangling_ = v;
  return dangling_;
}

double InfluenceCalculator::self_gain(std::size_t word) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = self_gain_.find(word); it != self_gain_.end()) return it->second;
  }
  std::vector<double> rhs(graph_.num_papers() + graph_.num_words(), 0.0);
  rhs[graph_.num_papers() + word] = 1.0;
  const double gain = (1.0 - graph_.restart) * word_out(solve(rhs, true), word);
  std::lock_guard lock(mutex_);
  return self_gain_.emplace(word, gain).first->second;
}

// Blocking word w removes column t_w from T, a rank-one change of
// A = I - bT. With z = A^{-1} e_s and g = b A^{-1} t_w, Sherman-Morrison gives
//   z' = z - g * z_w / (1 + g_w).
// Dangling papers return their mass to the source, which only rescales the
// state: x = c z with c = a / (1 - b d.z), and likewise for the blocked walk.
std::shared_ptr<const InfluenceProfile> InfluenceCalculator::profile(std::size_t source,
                                                                     std::size_t target) const {
  const std::size_t P = graph_.num_papers();
  if (source >= P || target >= P) throw LookupError("influence endpoint out of range");
  {
    std::lock_guard lock(mutex_);
    if (auto it = profiles_.find({source, target}); it != profiles_.end()) return it->second;
  }
  const double a = graph_.restart;
  const double b = 1.0 - a;
  auto z = forward_solve(source);
  auto yt = adjoint_solve(target);
  bool has_dangling = false;
  double dz = 0.0;
  double zsum = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    zsum += (*z)[p];
    if (graph_.dangling[p]) {
      has_dangling = true;
      dz += (*z)[p];
    }
  }
  Vec yd = has_dangling ? dangling_adjoint() : nullptr;
  const double c = a / (1.0 - b * dz);
  const double norm = c * zsum;

  auto prof = std::make_shared<InfluenceProfile>();
  prof->source = source;
  prof->target = target;
  prof->dimension = graph_.num_words();
  for (std::size_t w = 0; w < graph_.num_words(); ++w) {
    const double zw = (*z)[P + w];
    if (zw == 0.0) continue;
    const double scale = zw / (1.0 + self_gain(w));
    const double zt_blocked = (*z)[target] - b * word_out(*yt, w) * scale;
    double c_blocked = c;
    if (yd) c_blocked = a / (1.0 - b * (dz - b * word_out(*yd, w) * scale));
    const double v = (c * (*z)[target] - c_blocked * zt_blocked) / norm;
    if (v != 0.0) prof->per_word.emplace_back(w, v);
  }
  std::lock_guard lock(mutex_);
  return profiles_.emplace(std::make_pair(source, target), std::move(prof)).first->second;
}

}  // namespace evochain
