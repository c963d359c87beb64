#pragma once

#include <string>
#include <vector>

#include "invmeas/core.hpp"

namespace invmeas {

// Atomic probability space: strictly positive weights summing to 1.
struct FiniteSpace {
  std::vector<double> mu;
};

FiniteSpace make_finite_space(std::vector<double> weights);
FiniteSpace uniform_finite_space(int m);

// Joint probability matrix whose row sums are the source weights and column
// sums the target weights (entries are probabilities, not densities).
struct FinitePolymorphism {
  FiniteSpace source;
  FiniteSpace target;
  Mat joint;  // m x n
};

FinitePolymorphism make_polymorphism(FiniteSpace source, FiniteSpace target,
                                     Mat joint);
FinitePolymorphism identity_polymorphism(const FiniteSpace& space);
// Graph of the measure-preserving bijection i -> perm[i]; target weights are
// the permuted source weights.
FinitePolymorphism graph_polymorphism(const FiniteSpace& source,
                                      const std::vector<int>& perm);
FinitePolymorphism product_polymorphism(const FiniteSpace& source,
                                        const FiniteSpace& target);

// Markov operator L^2(source) -> L^2(target): nonnegative entries, rows sum
// to one, the weighted adjoint preserves constants, operator norm one.
struct MarkovOp {
  FiniteSpace source;
  FiniteSpace target;
  Mat t;  // n x m
};

// (Tf)(n) = sum_m joint(m,n) f(m) / nu(n).
MarkovOp to_markov(const FinitePolymorphism& p);

// joint(m,n) = nu(n) t(n,m); throws MarginalViolation when t fails the
// constant-preservation checks in either direction.
FinitePolymorphism from_markov(const MarkovOp& op);

// Kernel product joint_s * diag(nu)^{-1} * joint_t; Markov operators compose
// in the reverse order.
FinitePolymorphism compose(const FinitePolymorphism& s,
                           const FinitePolymorphism& t);

FinitePolymorphism adjoint(const FinitePolymorphism& p);

// Largest singular value of diag(nu)^{1/2} t diag(mu)^{-1/2}; equals 1 for
// every Markov operator.
double markov_norm(const MarkovOp& op);

// For uniform marginals and joint entries integral multiples of 1/(L m):
// splits each atom into L equal sub-atoms and routes them greedily, giving a
// permutation of L*m points whose induced coarse joint is the input exactly.
std::vector<int> approximate_by_permutation(const FinitePolymorphism& p,
                                            long refinement);

// Coarse polymorphism induced by a permutation of m*L sub-atoms.
FinitePolymorphism induced_polymorphism(const std::vector<int>& perm, int m,
                                        long refinement);

// {"mu": [...], "nu": [...], "joint": [[...], ...]}
std::string polymorphism_to_json(const FinitePolymorphism& p);
FinitePolymorphism polymorphism_from_json(const std::string& text);

}  // namespace invmeas
