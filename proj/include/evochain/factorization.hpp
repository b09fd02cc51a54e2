#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "evochain/corpus.hpp"

namespace evochain {

// Facets of the paper/word/author metagraph.
enum class Facet { Paper = 0, Word = 1, Author = 2 };

using RelationWeights = std::array<double, 3>;  // citation, content, authorship

inline constexpr RelationWeights kEqualWeights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

// Joint model of the three relations: X_r ~ sum_k core[k] * U_a(:,k) U_b(:,k)^T, with
// (a, b) = (paper, paper), (paper, word), (paper, author) for r = citation, content, authorship.
struct MetaFacModel {
  int K = 0;
  Eigen::VectorXd core;  // community probabilities, sums to 1
  Eigen::MatrixXd U1;    // P x K, paper factor
  Eigen::MatrixXd U2;    // W x K, word factor
  Eigen::MatrixXd U3;    // A x K, author factor
  RelationWeights weights = kEqualWeights;
  std::uint64_t seed = 0;
  std::vector<double> objective_trace;

  const Eigen::MatrixXd& factor(Facet f) const;
  Eigen::MatrixXd& factor(Facet f);
};

struct FactorizeOptions {
  int K = 30;
  RelationWeights weights = kEqualWeights;
  std::uint64_t seed = 0;
  int max_iters = 300;
  double tol = 1e-6;
};

// The three relations, each scaled to unit total mass; this is the data the
// model is fitted to and the objective is evaluated on.
struct NormalizedRelations {
  std::array<SparseMatrix, 3> X;
  std::array<Facet, 3> row_facet{Facet::Paper, Facet::Paper, Facet::Paper};
  std::array<Facet, 3> col_facet{Facet::Paper, Facet::Word, Facet::Author};
};

NormalizedRelations normalize_relations(const RelationSet& relations);

MetaFacModel factorize(const RelationSet& relations, const FactorizeOptions& options);
MetaFacModel factorize(const NormalizedRelations& relations, const FactorizeOptions& options);

// Generalized KL divergence sum_ij [x log(x / xhat) - x + xhat], 0 log 0 = 0.
// Returns +inf when xhat = 0 where x > 0.
double generalized_kl(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat);

// Reconstruction of relation r (dense; for small instances and tests).
Eigen::MatrixXd reconstruct(const MetaFacModel& model, int relation);

// sum_r w_r D(X_r || Xhat_r) on the normalized relations.
double objective_value(const NormalizedRelations& relations, const MetaFacModel& model);
double objective_value(const RelationSet& relations, const MetaFacModel& model);

// E-step allocation of cell (i, j) of relation r across the K communities.
Eigen::VectorXd responsibilities(const NormalizedRelations& relations, const MetaFacModel& model,
                                 int relation, Eigen::Index i, Eigen::Index j);

struct TopicDistribution {
  Eigen::VectorXd probs;
};

// p(k | i) = U1(i, k) core[k] / sum_k' U1(i, k') core[k'].
TopicDistribution topic_distribution(const MetaFacModel& model, Eigen::Index paper);

// {k : probs[k] >= com_t}, or {argmax} when that set is empty (lowest index on ties).
std::set<int> assign_communities(const TopicDistribution& t, double com_t);

// Structured-text checkpoint. Doubles are written as hex floats so a
// save/load cycle is bit-exact.
void save_model(std::ostream& out, const MetaFacModel& model);
MetaFacModel load_model(std::istream& in);

}  // namespace evochain
