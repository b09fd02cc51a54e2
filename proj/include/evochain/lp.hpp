#pragma once

#include <cstddef>
#include <vector>

namespace evochain {

// maximize c.x  subject to  A_le x <= b_le,  A_eq x = b_eq,  x >= 0,
// with b_le >= 0 and b_eq >= 0. Dense rows, one vector per constraint.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  // Shadow prices: value gained per unit increase of each right-hand side.
  std::vector<double> le_duals;
  std::vector<double> eq_duals;
  int pivots = 0;
};

// Two-phase dense tableau simplex. Entering column by largest reduced cost
// (lowest index on ties), falling back to Bland's rule after a run of
// degenerate pivots; leaving row by minimum ratio, lowest basic index on ties.
// Deterministic for a given program.
LpSolution solve_lp(const LinearProgram& lp);

struct MaximinOptions {
  // Grow the word set from the links' best words until no excluded word has
  // a positive reduced cost. Off = solve the full program in one go.
  bool column_generation = true;
};

struct MaximinSolution {
  double score = 0.0;
  std::vector<std::vector<double>> weights;  // one distribution per link
};

// max s  s.t.  sum_i t^j_i v_j[i] >= s,  sum_i t^j_i = 1,  t >= 0,
//              |t^j_i - t^{j+1}_i| <= r  for consecutive links.
// Negative entries of the link vectors are treated as zero.
MaximinSolution solve_maximin_lp(const std::vector<std::vector<double>>& link_vectors, double r,
                                 const MaximinOptions& opts = {});

}  // namespace evochain
