#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "evochain/chains.hpp"
#include "evochain/coherence.hpp"
#include "evochain/influence.hpp"

namespace evochain::oracle {

inline SparseMatrix content_from(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd d(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return d.sparseView();
}

// Random paper/word weights. Some papers may end up with no words.
inline SparseMatrix random_content(std::mt19937_64& rng, int papers, int words, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(papers, words);
  for (int i = 0; i < papers; ++i)
    for (int w = 0; w < words; ++w)
      if (u(rng) < density) d(i, w) = 0.5 + 2.0 * u(rng);
  d(0, 0) = 1.0;
  return d.sparseView();
}

// Stationary walk state from the dense system (I - (1 - a) M) x = a e_start,
// where M moves paper mass to words, word mass to papers, and the mass of a
// paper without words back to the start node.
inline std::vector<double> dense_walk(const BipartiteWalkGraph& g, std::size_t start) {
  const auto P = static_cast<Eigen::Index>(g.num_papers());
  const auto W = static_cast<Eigen::Index>(g.num_words());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(P + W, P + W);
  Eigen::MatrixXd pw(g.paper_to_word), wp(g.word_to_paper);
  for (Eigen::Index p = 0; p < P; ++p) {
    if (g.dangling[static_cast<std::size_t>(p)]) {
      M(static_cast<Eigen::Index>(start), p) += 1.0;
      continue;
    }
    for (Eigen::Index w = 0; w < W; ++w) M(P + w, p) = pw(p, w);
  }
  for (Eigen::Index w = 0; w < W; ++w)
    for (Eigen::Index p = 0; p < P; ++p) M(p, P + w) = wp(w, p);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(P + W, P + W) - (1.0 - g.restart) * M;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(P + W);
  rhs[static_cast<Eigen::Index>(start)] = g.restart;
  Eigen::VectorXd x = A.fullPivLu().solve(rhs);
  return {x.data(), x.data() + x.size()};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Best max-min value over topics restricted to the simplex grid of the given
// step count, with |t_j[n] - t_{j+1}[n]| <= r for every word. Dynamic program
// over links; the r-neighbourhood maximum is built from unit grid moves
// (each keeps the sum and shifts every coordinate by at most one step).
// Supports up to 4 words.
inline double grid_maximin(const std::vector<std::vector<double>>& links, double r, int steps = 100) {
  const std::size_t d = links.front().size();
  const int S = steps;
  const int R = static_cast<int>(std::floor(r * S + 1e-9));
  // Points indexed by their first d-1 coordinates; the last is implied.
  std::vector<std::vector<int>> points;
  std::vector<int> cur(d, 0);
  std::function<void(std::size_t, int)> gen = [&](std::size_t k, int left) {
    if (k + 1 == d) {
      cur[k] = left;
      points.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[k] = v;
      gen(k + 1, left - v);
    }
  };
  gen(0, S);
  auto key = [&](const std::vector<int>& t) {
    std::size_t k = 0;
    for (std::size_t i = 0; i + 1 < d; ++i) k = k * static_cast<std::size_t>(S + 1) + static_cast<std::size_t>(t[i]);
    return k;
  };
  std::size_t cells = 1;
  for (std::size_t i = 0; i + 1 < d; ++i) cells *= static_cast<std::size_t>(S + 1);
  std::vector<int> slot(cells, -1);
  for (std::size_t i = 0; i < points.size(); ++i) slot[key(points[i])] = static_cast<int>(i);

  // Unit moves: every vector in {-1, 0, 1}^d with zero sum.
  std::vector<std::vector<int>> moves;
  std::vector<int> m(d, -1);
  std::function<void(std::size_t)> genm = [&](std::size_t k) {
    if (k == d) {
      int s = 0;
      for (int x : m) s += x;
      if (s == 0) moves.push_back(m);
      return;
    }
    for (int v = -1; v <= 1; ++v) {
      m[k] = v;
      genm(k + 1);
    }
  };
  genm(0);

  auto value = [&](std::size_t j, const std::vector<int>& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += links[j][i] * t[i] / S;
    return s;
  };

  std::vector<double> V(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) V[i] = value(0, points[i]);
  for (std::size_t j = 1; j < links.size(); ++j) {
    std::vector<double> G = V;
    if (R >= S) {
      G.assign(V.size(), *std::max_element(V.begin(), V.end()));
    } else {
      for (int step = 0; step < R; ++step) {
        std::vector<double> next = G;
        std::vector<int> t(d);
        for (std::size_t i = 0; i < points.size(); ++i) {
          for (const auto& mv : moves) {
            bool ok = true;
            for (std::size_t c = 0; c < d && ok; ++c) {
              t[c] = points[i][c] + mv[c];
              ok = t[c] >= 0 && t[c] <= S;
            }
            if (ok) next[i] = std::max(next[i], G[static_cast<std::size_t>(slot[key(t)])]);
          }
        }
        G.swap(next);
      }
    }
    for (std::size_t i = 0; i < points.size(); ++i) V[i] = std::min(G[i], value(j, points[i]));
  }
  return *std::max_element(V.begin(), V.end());
}

// Best coherence by enumerating every chronological subset of the pool that
// satisfies the constraint. Ties resolve to the lexicographically smallest id
// sequence.
inline ChainResult enumerate_chains(const Corpus& corpus, const CandidatePool& pool, const ChainConstraint& c,
                                    std::size_t n, double r, const InfluenceCalculator& calc) {
  std::vector<std::size_t> cands;
  for (auto [p, rel] : pool.papers) cands.push_back(p);
  std::sort(cands.begin(), cands.end(), [&](auto a, auto b) { return corpus.precedes(a, b); });
  std::optional<ChainResult> best;
  std::vector<std::size_t> pick;
  auto ids = [&](const std::vector<std::size_t>& v) {
    std::vector<std::string> out;
    for (auto p : v) out.push_back(corpus.paper(p).id);
    return out;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == n) {
      if (c.kind == QueryKind::SinglePaper && std::find(pick.begin(), pick.end(), *c.anchor) == pick.end()) return;
      if (c.kind == QueryKind::TwoPaper && (pick.front() != *c.anchor || pick.back() != *c.target)) return;
      std::vector<ProfileRef> links;
      for (std::size_t k = 0; k + 1 < n; ++k) links.push_back(calc.profile(pick[k], pick[k + 1]));
      auto coh = coherence_evolving_topic(links, r);
      if (!best || coh.score > best->coherence.score ||
          (coh.score == best->coherence.score && ids(pick) < ids(best->chain.papers)))
        best = ChainResult{Chain{pick}, coh};
      return;
    }
    for (std::size_t i = from; i < cands.size(); ++i) {
      pick.push_back(cands[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return *best;
}

}  // namespace evochain::oracle
