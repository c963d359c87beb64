#include "invmeas/polymorph.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <json.hpp>

#include "invmeas/errors.hpp"

namespace invmeas {

namespace {

constexpr double kMarginalTol = 1e-12;

void check_same_space(const FiniteSpace& a, const FiniteSpace& b) {
  if (a.mu.size() != b.mu.size())
    throw SpaceMismatch("inner spaces differ in size");
  for (std::size_t i = 0; i < a.mu.size(); ++i)
    if (std::abs(a.mu[i] - b.mu[i]) > kMarginalTol)
      throw SpaceMismatch("inner spaces carry different weights");
}

}  // namespace

FiniteSpace make_finite_space(std::vector<double> weights) {
  if (weights.empty()) throw DomainError("empty space");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("weights must be strictly positive");
    total += w;
  }
  if (std::abs(total - 1.0) > kMarginalTol)
    throw DomainError("weights must sum to one");
  FiniteSpace s;
  s.mu = std::move(weights);
  return s;
}

FiniteSpace uniform_finite_space(int m) {
  if (m < 1) throw DomainError("space needs at least one atom");
  return {std::vector<double>(m, 1.0 / m)};
}

FinitePolymorphism make_polymorphism(FiniteSpace source, FiniteSpace target,
                                     Mat joint) {
  const int m = static_cast<int>(source.mu.size());
  const int n = static_cast<int>(target.mu.size());
  if (joint.rows() != m || joint.cols() != n)
    throw SizeMismatch("joint shape must match the spaces");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (joint(i, j) < 0.0) throw DomainError("joint entries must be >= 0");
  for (int i = 0; i < m; ++i)
    if (std::abs(joint.row(i).sum() - source.mu[i]) > kMarginalTol)
      throw MarginalViolation("row sums must match the source weights");
  for (int j = 0; j < n; ++j)
    if (std::abs(joint.col(j).sum() - target.mu[j]) > kMarginalTol)
      throw MarginalViolation("column sums must match the target weights");
  FinitePolymorphism p;
  p.source = std::move(source);
  p.target = std::move(target);
  p.joint = std::move(joint);
  return p;
}

FinitePolymorphism identity_polymorphism(const FiniteSpace& space) {
  const int m = static_cast<int>(space.mu.size());
  Mat joint = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) joint(i, i) = space.mu[i];
  return make_polymorphism(space, space, std::move(joint));
}

FinitePolymorphism graph_polymorphism(const FiniteSpace& source,
                                      const std::vector<int>& perm) {
  const int m = static_cast<int>(source.mu.size());
  if (static_cast<int>(perm.size()) != m)
    throw SizeMismatch("permutation degree must match the space");
  std::vector<char> seen(m, 0);
  for (int v : perm) {
    if (v < 0 || v >= m || seen[v]) throw DomainError("not a permutation");
    seen[v] = 1;
  }
  FiniteSpace target;
  target.mu.resize(m);
  for (int i = 0; i < m; ++i) target.mu[perm[i]] = source.mu[i];
  Mat joint = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) joint(i, perm[i]) = source.mu[i];
  return make_polymorphism(source, std::move(target), std::move(joint));
}

FinitePolymorphism product_polymorphism(const FiniteSpace& source,
                                        const FiniteSpace& target) {
  const int m = static_cast<int>(source.mu.size());
  const int n = static_cast<int>(target.mu.size());
  Mat joint(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) joint(i, j) = source.mu[i] * target.mu[j];
  return make_polymorphism(source, target, std::move(joint));
}

MarkovOp to_markov(const FinitePolymorphism& p) {
  const int m = static_cast<int>(p.source.mu.size());
  const int n = static_cast<int>(p.target.mu.size());
  MarkovOp op;
  op.source = p.source;
  op.target = p.target;
  op.t.resize(n, m);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) op.t(j, i) = p.joint(i, j) / p.target.mu[j];
  return op;
}

FinitePolymorphism from_markov(const MarkovOp& op) {
  const int m = static_cast<int>(op.source.mu.size());
  const int n = static_cast<int>(op.target.mu.size());
  if (op.t.rows() != n || op.t.cols() != m)
    throw SizeMismatch("operator shape must match the spaces");
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i)
      if (op.t(j, i) < 0.0)
        throw MarginalViolation("operator entries must be >= 0");
  for (int j = 0; j < n; ++j)
    if (std::abs(op.t.row(j).sum() - 1.0) > 1e-10)
      throw MarginalViolation("operator must preserve constants");
  Mat joint(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) joint(i, j) = op.target.mu[j] * op.t(j, i);
  for (int i = 0; i < m; ++i)
    if (std::abs(joint.row(i).sum() - op.source.mu[i]) > 1e-10)
      throw MarginalViolation("weighted adjoint must preserve constants");
  return make_polymorphism(op.source, op.target, std::move(joint));
}

FinitePolymorphism compose(const FinitePolymorphism& s,
                           const FinitePolymorphism& t) {
  check_same_space(s.target, t.source);
  const int n = static_cast<int>(s.target.mu.size());
  Vec inv(n);
  for (int j = 0; j < n; ++j) inv[j] = 1.0 / s.target.mu[j];
  Mat joint = s.joint * inv.asDiagonal() * t.joint;
  return make_polymorphism(s.source, t.target, std::move(joint));
}

FinitePolymorphism adjoint(const FinitePolymorphism& p) {
  FinitePolymorphism q;
  q.source = p.target;
  q.target = p.source;
  q.joint = p.joint.transpose();
  return q;
}

double markov_norm(const MarkovOp& op) {
  const int m = static_cast<int>(op.source.mu.size());
  const int n = static_cast<int>(op.target.mu.size());
  Mat w(n, m);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i)
      w(j, i) = std::sqrt(op.target.mu[j]) * op.t(j, i) /
                std::sqrt(op.source.mu[i]);
  Eigen::JacobiSVD<Mat> svd(w);
  return svd.singularValues()[0];
}

std::vector<int> approximate_by_permutation(const FinitePolymorphism& p,
                                            long refinement) {
  const int m = static_cast<int>(p.source.mu.size());
  if (static_cast<int>(p.target.mu.size()) != m)
    throw SpaceMismatch("source and target must coincide");
  if (refinement < 1) throw DomainError("refinement must be positive");
  for (int i = 0; i < m; ++i)
    if (std::abs(p.source.mu[i] - 1.0 / m) > kMarginalTol ||
        std::abs(p.target.mu[i] - 1.0 / m) > kMarginalTol)
      throw DomainError("marginals must be uniform");

  // Sub-atom counts q(i,j) = joint(i,j) * L * m; rows and columns sum to L.
  Eigen::MatrixXi q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double raw = p.joint(i, j) * double(refinement) * m;
      const long rounded = std::lround(raw);
      if (std::abs(raw - double(rounded)) > 1e-9)
        throw NotRational("joint entries must be multiples of 1/(L m)");
      q(i, j) = static_cast<int>(rounded);
    }

  std::vector<int> perm(std::size_t(m) * refinement);
  std::vector<long> next_free(m, 0);
  for (int i = 0; i < m; ++i) {
    long sub = 0;
    for (int j = 0; j < m; ++j)
      for (int r = 0; r < q(i, j); ++r) {
        perm[std::size_t(i) * refinement + sub] =
            static_cast<int>(j * refinement + next_free[j]);
        ++sub;
        ++next_free[j];
      }
    if (sub != refinement)
      throw NotRational("row counts do not fill the refinement");
  }
  return perm;
}

FinitePolymorphism induced_polymorphism(const std::vector<int>& perm, int m,
                                        long refinement) {
  if (static_cast<long>(perm.size()) != m * refinement)
    throw SizeMismatch("permutation degree must equal m * refinement");
  Mat joint = Mat::Zero(m, m);
  for (std::size_t s = 0; s < perm.size(); ++s) {
    const int i = static_cast<int>(s / refinement);
    const int j = static_cast<int>(perm[s] / refinement);
    joint(i, j) += 1.0;
  }
  joint /= double(m) * double(refinement);
  FiniteSpace u = uniform_finite_space(m);
  return make_polymorphism(u, u, std::move(joint));
}

std::string polymorphism_to_json(const FinitePolymorphism& p) {
  nlohmann::json j;
  j["mu"] = p.source.mu;
  j["nu"] = p.target.mu;
  j["joint"] = nlohmann::json::array();
  for (int i = 0; i < p.joint.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < p.joint.cols(); ++k) row.push_back(p.joint(i, k));
    j["joint"].push_back(row);
  }
  return j.dump(2);
}

FinitePolymorphism polymorphism_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto nu = j.at("nu").get<std::vector<double>>();
    const auto rows = j.at("joint").get<std::vector<std::vector<double>>>();
    Mat joint(mu.size(), nu.size());
    if (rows.size() != mu.size()) throw SizeMismatch("joint row count");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != nu.size()) throw SizeMismatch("joint column count");
      for (std::size_t k = 0; k < nu.size(); ++k) joint(i, k) = rows[i][k];
    }
    return make_polymorphism(make_finite_space(mu), make_finite_space(nu),
                             std::move(joint));
  } catch (const nlohmann::json::exception&) {
    throw DomainError("malformed polymorphism JSON");
  }
}

}  // namespace invmeas
