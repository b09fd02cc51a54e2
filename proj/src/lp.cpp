#include "evochain/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evochain/errors.hpp"

namespace evochain {

namespace {

constexpr double kEps = 1e-11;
constexpr int kDegenerateRunBeforeBland = 50;
constexpr int kMaxPivots = 200000;

class Tableau {
 public:
  Tableau(const LinearProgram& lp)
      : n_(lp.objective.size()),
        m_le_(lp.le_rows.size()),
        m_eq_(lp.eq_rows.size()),
        m_(m_le_ + m_eq_),
        cols_(n_ + m_le_ + m_eq_),
        t_(m_ * cols_, 0.0),
        rhs_(m_, 0.0),
        basis_(m_),
        rc_(cols_, 0.0) {
    for (std::size_t i = 0; i < m_le_; ++i) {
      if (lp.le_rows[i].size() != n_) throw ValidationError("LP row width mismatch");
      if (lp.le_rhs[i] < 0.0) throw ValidationError("LP inequality right-hand sides must be nonnegative");
      std::copy(lp.le_rows[i].begin(), lp.le_rows[i].end(), row(i));
      at(i, n_ + i) = 1.0;
      rhs_[i] = lp.le_rhs[i];
      basis_[i] = n_ + i;
    }
    for (std::size_t k = 0; k < m_eq_; ++k) {
      const std::size_t i = m_le_ + k;
      if (lp.eq_rows[k].size() != n_) throw ValidationError("LP row width mismatch");
      if (lp.eq_rhs[k] < 0.0) throw ValidationError("LP equality right-hand sides must be nonnegative");
      std::copy(lp.eq_rows[k].begin(), lp.eq_rows[k].end(), row(i));
      at(i, n_ + m_le_ + k) = 1.0;
      rhs_[i] = lp.eq_rhs[k];
      basis_[i] = n_ + m_le_ + k;
    }
  }

  LpSolution solve(const std::vector<double>& objective) {
    LpSolution sol;
    if (m_eq_ > 0) {
      std::vector<double> phase1(cols_, 0.0);
      for (std::size_t k = 0; k < m_eq_; ++k) phase1[n_ + m_le_ + k] = -1.0;
      price(phase1);
      run(cols_, sol.pivots);
      if (value_ < -1e-9) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
      drive_out_artificials(sol.pivots);
    }
    std::vector<double> cost(cols_, 0.0);
    std::copy(objective.begin(), objective.end(), cost.begin());
    price(cost);
    if (!run(n_ + m_le_, sol.pivots)) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    sol.status = LpStatus::Optimal;
    sol.value = value_;
    sol.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) sol.x[basis_[i]] = std::max(0.0, rhs_[i]);
    sol.le_duals.resize(m_le_);
    for (std::size_t i = 0; i < m_le_; ++i) sol.le_duals[i] = -rc_[n_ + i];
    sol.eq_duals.resize(m_eq_);
    for (std::size_t k = 0; k < m_eq_; ++k) sol.eq_duals[k] = -rc_[n_ + m_le_ + k];
    return sol;
  }

 private:
  std::size_t n_, m_le_, m_eq_, m_, cols_;
  std::vector<double> t_;
  std::vector<double> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<double> rc_;
  double value_ = 0.0;

  double* row(std::size_t i) { return t_.data() + i * cols_; }
  double& at(std::size_t i, std::size_t j) { return t_[i * cols_ + j]; }

  // Reduced costs and objective value of the current basis under `cost`.
  void price(const std::vector<double>& cost) {
    rc_ = cost;
    value_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* r = row(i);
      for (std::size_t j = 0; j < cols_; ++j) rc_[j] -= cb * r[j];
      value_ += cb * rhs_[i];
    }
  }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    rhs_[pr] *= inv;
    prow[pc] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == pr) continue;
      double* r = row(i);
      const double f = r[pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) r[j] -= f * prow[j];
      r[pc] = 0.0;
      rhs_[i] -= f * rhs_[pr];
    }
    const double f = rc_[pc];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) rc_[j] -= f * prow[j];
      rc_[pc] = 0.0;
      value_ += f * rhs_[pr];
    }
    basis_[pr] = pc;
  }

  // Primal simplex over columns [0, allowed). Returns false when unbounded.
  bool run(std::size_t allowed, int& pivots) {
    int degenerate_run = 0;
    while (true) {
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      std::size_t enter = cols_;
      double best = kEps;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (rc_[j] > best) {
          enter = j;
          if (bland) break;
          best = rc_[j];
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = m_;
      double ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kEps) continue;
        const double q = std::max(0.0, rhs_[i]) / a;
        if (q < ratio - 1e-15 || (q <= ratio + 1e-15 && leave < m_ && basis_[i] < basis_[leave])) {
          ratio = std::min(ratio, q);
          leave = i;
        }
      }
      if (leave == m_) return false;
      degenerate_run = ratio <= 1e-15 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      if (++pivots > kMaxPivots) throw NumericError("simplex exceeded the pivot limit");
    }
  }

  void drive_out_artificials(int& pivots) {
    const std::size_t first_artificial = n_ + m_le_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_artificial) continue;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (std::abs(at(i, j)) > 1e-9) {
          pivot(i, j);
          ++pivots;
          break;
        }
      }
    }
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  if (lp.le_rows.size() != lp.le_rhs.size() || lp.eq_rows.size() != lp.eq_rhs.size())
    throw ValidationError("LP row/right-hand-side count mismatch");
  Tableau tableau(lp);
  return tableau.solve(lp.objective);
}

namespace {

// Variables: s, then t^j_i for j in links, i in `words` (link-major).
struct RestrictedProgram {
  LinearProgram lp;
  std::size_t links = 0;
  std::size_t words = 0;
  std::size_t var(std::size_t j, std::size_t k) const { return 1 + j * words + k; }
};

RestrictedProgram build_program(const std::vector<std::vector<double>>& v, const std::vector<std::size_t>& words,
                                double r) {
  RestrictedProgram p;
  p.links = v.size();
  p.words = words.size();
  const std::size_t n = 1 + p.links * p.words;
  auto& lp = p.lp;
  lp.objective.assign(n, 0.0);
  lp.objective[0] = 1.0;
  for (std::size_t j = 0; j < p.links; ++j) {
    std::vector<double> row(n, 0.0);
    row[0] = 1.0;
    for (std::size_t k = 0; k < p.words; ++k) row[p.var(j, k)] = -v[j][words[k]];
    lp.le_rows.push_back(std::move(row));
    lp.le_rhs.push_back(0.0);
  }
  for (std::size_t j = 0; j + 1 < p.links; ++j) {
    for (std::size_t k = 0; k < p.words; ++k) {
      std::vector<double> up(n, 0.0);
      up[p.var(j, k)] = 1.0;
      up[p.var(j + 1, k)] = -1.0;
      std::vector<double> down(n, 0.0);
      down[p.var(j, k)] = -1.0;
      down[p.var(j + 1, k)] = 1.0;
      lp.le_rows.push_back(std::move(up));
      lp.le_rhs.push_back(r);
      lp.le_rows.push_back(std::move(down));
      lp.le_rhs.push_back(r);
    }
  }
  for (std::size_t j = 0; j < p.links; ++j) {
    std::vector<double> row(n, 0.0);
    for (std::size_t k = 0; k < p.words; ++k) row[p.var(j, k)] = 1.0;
    lp.eq_rows.push_back(std::move(row));
    lp.eq_rhs.push_back(1.0);
  }
  return p;
}

constexpr std::size_t kWordsPerRound = 8;

}  // namespace

MaximinSolution solve_maximin_lp(const std::vector<std::vector<double>>& link_vectors, double r,
                                 const MaximinOptions& opts) {
  if (link_vectors.empty()) throw ValidationError("at least one link is required");
  const std::size_t d = link_vectors.front().size();
  if (d == 0) throw ValidationError("link vectors must have at least one word");
  if (!(r >= 0.0)) throw ValidationError("smoothness r must be nonnegative");
  const std::size_t links = link_vectors.size();

  // Scale to unit max so solver tolerances are meaningful for tiny influences.
  double scale = 0.0;
  std::vector<std::vector<double>> v(links);
  for (std::size_t j = 0; j < links; ++j) {
    if (link_vectors[j].size() != d) throw ValidationError("link vectors differ in dimension");
    v[j].resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double x = link_vectors[j][i];
      if (!std::isfinite(x)) throw ValidationError("link vectors must be finite");
      v[j][i] = std::max(0.0, x);
      scale = std::max(scale, v[j][i]);
    }
  }

  MaximinSolution out;
  out.weights.assign(links, std::vector<double>(d, 1.0 / static_cast<double>(d)));
  if (scale == 0.0) return out;
  for (auto& row : v)
    for (auto& x : row) x /= scale;

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < d; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < links && !any; ++j) any = v[j][i] > 0.0;
    if (any) active.push_back(i);
  }

  std::vector<std::size_t> words;
  if (opts.column_generation) {
    for (std::size_t j = 0; j < links; ++j) {
      std::size_t best = active.front();
      for (auto i : active)
        if (v[j][i] > v[j][best]) best = i;
      words.push_back(best);
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
  } else {
    words = active;
  }

  while (true) {
    auto program = build_program(v, words, r);
    auto sol = solve_lp(program.lp);
    if (sol.status != LpStatus::Optimal) throw NumericError("max-min program did not reach an optimum");

    std::vector<std::pair<double, std::size_t>> entering;
    if (opts.column_generation && words.size() < active.size()) {
      std::vector<bool> in_set(d, false);
      for (auto i : words) in_set[i] = true;
      for (auto i : active) {
        if (in_set[i]) continue;
        double best = 0.0;
        for (std::size_t j = 0; j < links; ++j)
          best = std::max(best, sol.le_duals[j] * v[j][i] - sol.eq_duals[j]);
        if (best > 1e-10) entering.emplace_back(-best, i);
      }
    }
    if (entering.empty()) {
      out.score = sol.value * scale;
      for (std::size_t j = 0; j < links; ++j) {
        std::fill(out.weights[j].begin(), out.weights[j].end(), 0.0);
        for (std::size_t k = 0; k < words.size(); ++k) out.weights[j][words[k]] = sol.x[program.var(j, k)];
      }
      return out;
    }
    std::sort(entering.begin(), entering.end());
    if (entering.size() > kWordsPerRound) entering.resize(kWordsPerRound);
    for (auto [neg, i] : entering) words.push_back(i);
    std::sort(words.begin(), words.end());
  }
}

}  // namespace evochain
