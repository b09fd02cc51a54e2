#include "evochain/factorization.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "evochain/errors.hpp"

namespace evochain {

namespace {

constexpr double kFloor = 1e-12;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void normalize_columns(Eigen::MatrixXd& u) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    double s = u.col(k).sum();
    if (s > kFloor) {
      u.col(k) /= s;
    } else {
      // Dead community: its core weight is zero, so any point of the simplex
      // leaves the reconstruction unchanged.
      u.col(k).setConstant(1.0 / static_cast<double>(u.rows()));
    }
  }
}

Eigen::MatrixXd random_factor(Eigen::Index rows, int K, std::mt19937_64& rng) {
  Eigen::MatrixXd u(rows, K);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (int k = 0; k < K; ++k) u(i, k) = 0.1 + 0.9 * uniform01(rng);
  normalize_columns(u);
  return u;
}

Eigen::Index facet_size(const NormalizedRelations& rel, Facet f) {
  for (int r = 0; r < 3; ++r) {
    if (rel.row_facet[r] == f) return rel.X[r].rows();
    if (rel.col_facet[r] == f) return rel.X[r].cols();
  }
  return 0;
}

void validate_weights(const RelationWeights& w) {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("relation weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("relation weights must sum to 1");
}

struct Accumulators {
  Eigen::VectorXd core;
  std::array<Eigen::MatrixXd, 3> factors;
};

// One pass over every nonzero cell: evaluates the objective at the current
// parameters and, when `acc` is given, accumulates the weighted
// responsibilities for the M-step.
double expectation(const NormalizedRelations& rel, const MetaFacModel& m, Accumulators* acc) {
  const int K = m.K;
  Eigen::VectorXd v(K);
  double total = 0.0;
  for (int r = 0; r < 3; ++r) {
    const double w = m.weights[static_cast<size_t>(r)];
    const auto& X = rel.X[static_cast<size_t>(r)];
    if (w == 0.0) continue;
    const auto& Ua = m.factor(rel.row_facet[static_cast<size_t>(r)]);
    const auto& Ub = m.factor(rel.col_facet[static_cast<size_t>(r)]);
    double divergence = 0.0;
    double mass = 0.0;
    for (Eigen::Index i = 0; i < X.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(X, i); it; ++it) {
        const double x = it.value();
        if (x <= 0.0) continue;
        const Eigen::Index j = it.col();
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
          v[k] = m.core[k] * Ua(i, k) * Ub(j, k);
          s += v[k];
        }
        divergence += s > 0.0 ? x * std::log(x / s) : std::numeric_limits<double>::infinity();
        mass += x;
        if (acc != nullptr) {
          const double scale = w * x / std::max(s, kFloor);
          auto& Aa = acc->factors[static_cast<size_t>(rel.row_facet[static_cast<size_t>(r)])];
          auto& Ab = acc->factors[static_cast<size_t>(rel.col_facet[static_cast<size_t>(r)])];
          for (int k = 0; k < K; ++k) {
            const double c = scale * v[k];
            acc->core[k] += c;
            Aa(i, k) += c;
            Ab(j, k) += c;
          }
        }
      }
    }
    double model_mass = 0.0;
    for (int k = 0; k < K; ++k) model_mass += m.core[k] * Ua.col(k).sum() * Ub.col(k).sum();
    total += w * (divergence - mass + model_mass);
  }
  return total;
}

}  // namespace

const Eigen::MatrixXd& MetaFacModel::factor(Facet f) const {
  switch (f) {
    case Facet::Paper: return U1;
    case Facet::Word: return U2;
    case Facet::Author: return U3;
  }
  return U1;
}

Eigen::MatrixXd& MetaFacModel::factor(Facet f) {
  return const_cast<Eigen::MatrixXd&>(static_cast<const MetaFacModel&>(*this).factor(f));
}

NormalizedRelations normalize_relations(const RelationSet& relations) {
  NormalizedRelations out;
  out.X = {relations.citation, relations.content, relations.authorship};
  for (auto& X : out.X) {
    X.makeCompressed();
    const double s = X.sum();
    if (s > 0.0) X /= s;
  }
  return out;
}

MetaFacModel factorize(const RelationSet& relations, const FactorizeOptions& options) {
  return factorize(normalize_relations(relations), options);
}

MetaFacModel factorize(const NormalizedRelations& rel, const FactorizeOptions& options) {
  validate_weights(options.weights);
  if (options.K < 1) throw ValidationError("K must be at least 1");
  const Eigen::Index P = facet_size(rel, Facet::Paper);
  const Eigen::Index W = facet_size(rel, Facet::Word);
  const Eigen::Index A = facet_size(rel, Facet::Author);
  if (P == 0) throw ValidationError("relations are empty");
  bool any = false;
  for (int r = 0; r < 3; ++r) any = any || (options.weights[static_cast<size_t>(r)] > 0.0 && rel.X[r].nonZeros() > 0);
  if (!any) throw ValidationError("relations are empty");
  const Eigen::Index min_dim = std::min({P, W > 0 ? W : P, A > 0 ? A : P});
  if (options.K > min_dim)
    throw ValidationError("K=" + std::to_string(options.K) + " exceeds the smallest facet size " +
                          std::to_string(min_dim));

  MetaFacModel m;
  m.K = options.K;
  m.weights = options.weights;
  m.seed = options.seed;
  std::mt19937_64 rng(options.seed);
  m.U1 = random_factor(P, m.K, rng);
  m.U2 = random_factor(W, m.K, rng);
  m.U3 = random_factor(A, m.K, rng);
  m.core = Eigen::VectorXd::Constant(m.K, 1.0 / m.K);

  Accumulators acc;
  for (int it = 0;; ++it) {
    acc.core = Eigen::VectorXd::Zero(m.K);
    acc.factors = {Eigen::MatrixXd::Zero(P, m.K), Eigen::MatrixXd::Zero(W, m.K), Eigen::MatrixXd::Zero(A, m.K)};
    const double J = expectation(rel, m, &acc);
    if (!std::isfinite(J)) throw NumericError("non-finite objective at iteration " + std::to_string(it));
    const bool converged =
        !m.objective_trace.empty() && std::abs(m.objective_trace.back() - J) <= options.tol * std::abs(J);
    m.objective_trace.push_back(J);
    if (converged || J == 0.0 || it >= options.max_iters) break;

    const double core_sum = acc.core.sum();
    if (!(core_sum > 0.0) || !std::isfinite(core_sum))
      throw NumericError("degenerate community mass at iteration " + std::to_string(it));
    m.core = acc.core / core_sum;
    for (int f = 0; f < 3; ++f) {
      auto& U = m.factor(static_cast<Facet>(f));
      U = acc.factors[static_cast<size_t>(f)];
      if (!U.allFinite()) throw NumericError("non-finite factor at iteration " + std::to_string(it));
      normalize_columns(U);
    }
  }
  return m;
}

double generalized_kl(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xhat) {
  if (x.rows() != xhat.rows() || x.cols() != xhat.cols()) throw ValidationError("shape mismatch");
  double d = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double a = x(i, j);
      const double b = xhat(i, j);
      if (a > 0.0) {
        if (b <= 0.0) return std::numeric_limits<double>::infinity();
        d += a * std::log(a / b);
      }
      d += b - a;
    }
  }
  return d;
}

Eigen::MatrixXd reconstruct(const MetaFacModel& model, int relation) {
  static constexpr Facet cols[3] = {Facet::Paper, Facet::Word, Facet::Author};
  const auto& Ub = model.factor(cols[relation]);
  return model.U1 * model.core.asDiagonal() * Ub.transpose();
}

double objective_value(const NormalizedRelations& relations, const MetaFacModel& model) {
  return expectation(relations, model, nullptr);
}

double objective_value(const RelationSet& relations, const MetaFacModel& model) {
  return objective_value(normalize_relations(relations), model);
}

Eigen::VectorXd responsibilities(const NormalizedRelations& rel, const MetaFacModel& m, int relation,
                                 Eigen::Index i, Eigen::Index j) {
  const auto r = static_cast<size_t>(relation);
  const auto& Ua = m.factor(rel.row_facet[r]);
  const auto& Ub = m.factor(rel.col_facet[r]);
  Eigen::VectorXd v(m.K);
  for (int k = 0; k < m.K; ++k) v[k] = m.core[k] * Ua(i, k) * Ub(j, k);
  const double x = rel.X[r].coeff(i, j);
  return v * (x / std::max(v.sum(), kFloor));
}

TopicDistribution topic_distribution(const MetaFacModel& model, Eigen::Index paper) {
  if (paper < 0 || paper >= model.U1.rows()) throw LookupError("paper index out of range");
  Eigen::VectorXd joint = model.U1.row(paper).transpose().cwiseProduct(model.core);
  const double s = joint.sum();
  if (!(s > 0.0)) throw NumericError("paper " + std::to_string(paper) + " carries no community signal");
  return {joint / s};
}

std::set<int> assign_communities(const TopicDistribution& t, double com_t) {
  std::set<int> out;
  for (Eigen::Index k = 0; k < t.probs.size(); ++k)
    if (t.probs[k] >= com_t) out.insert(static_cast<int>(k));
  if (out.empty() && t.probs.size() > 0) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < t.probs.size(); ++k)
      if (t.probs[k] > t.probs[best]) best = k;
    out.insert(static_cast<int>(best));
  }
  return out;
}

namespace {

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string s;
    if (!(in_ >> s)) throw ParseError("model checkpoint truncated");
    return s;
  }
  void expect(const std::string& w) {
    auto s = word();
    if (s != w) throw ParseError("model checkpoint: expected '" + w + "', found '" + s + "'");
  }
  double number() {
    auto s = word();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParseError("model checkpoint: bad number '" + s + "'");
    return v;
  }
  long long integer() {
    auto s = word();
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw ParseError("model checkpoint: bad integer '" + s + "'");
    return v;
  }
  unsigned long long unsigned_integer() {
    auto s = word();
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw ParseError("model checkpoint: bad integer '" + s + "'");
    return v;
  }
  Eigen::MatrixXd matrix(const std::string& name) {
    expect(name);
    auto rows = integer();
    auto cols = integer();
    if (rows < 0 || cols < 0) throw ParseError("model checkpoint: negative shape");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number();
    return m;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(std::ostream& out, const MetaFacModel& model) {
  const auto flags = out.flags();
  out << "evochain-model 1\n";
  out << "K " << model.K << '\n';
  out << "seed " << model.seed << '\n';
  out << std::hexfloat;
  out << "weights " << model.weights[0] << ' ' << model.weights[1] << ' ' << model.weights[2] << '\n';
  out << "core " << model.core.size() << '\n';
  for (Eigen::Index k = 0; k < model.core.size(); ++k) out << (k ? " " : "") << model.core[k];
  out << '\n';
  write_matrix(out, "U1", model.U1);
  write_matrix(out, "U2", model.U2);
  write_matrix(out, "U3", model.U3);
  out << "trace " << model.objective_trace.size() << '\n';
  for (size_t t = 0; t < model.objective_trace.size(); ++t) out << (t ? " " : "") << model.objective_trace[t];
  out << '\n';
  out.flags(flags);
}

MetaFacModel load_model(std::istream& in) {
  TokenReader r(in);
  r.expect("evochain-model");
  if (r.integer() != 1) throw ParseError("model checkpoint: unsupported version");
  MetaFacModel m;
  r.expect("K");
  m.K = static_cast<int>(r.integer());
  r.expect("seed");
  m.seed = r.unsigned_integer();
  r.expect("weights");
  for (auto& w : m.weights) w = r.number();
  r.expect("core");
  auto n = r.integer();
  if (n != m.K) throw ParseError("model checkpoint: core length does not match K");
  m.core.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) m.core[k] = r.number();
  m.U1 = r.matrix("U1");
  m.U2 = r.matrix("U2");
  m.U3 = r.matrix("U3");
  if (m.U1.cols() != m.K || m.U2.cols() != m.K || m.U3.cols() != m.K)
    throw ParseError("model checkpoint: factor width does not match K");
  r.expect("trace");
  auto t = r.integer();
  m.objective_trace.resize(static_cast<size_t>(t));
  for (auto& v : m.objective_trace) v = r.number();
  return m;
}

}  // namespace evochain
