#pragma once

#include <random>

#include "invmeas/core.hpp"

namespace invmeas {

enum class Family { O, SO, U, SpCompact };

// n is the rank parameter. O/SO/U samples are n x n; SpCompact samples are
// returned as the 2n x 2n complex embedding [[phi, psi], [-conj psi, conj phi]]
// of an n x n quaternion-unitary matrix.
struct GroupKind {
  Family family;
  int n;
};

// Graph coordinate of a p-plane in R^{p+q}: the subspace is the row span
// {(x, x t) : x in R^p}.
struct GrassCoord {
  int p = 0;
  int q = 0;
  Mat t;
};

// Uniform point on the unit sphere of R^n / C^n.
Vec sample_sphere(int n, std::mt19937_64& rng);
CVec sample_sphere_complex(int n, std::mt19937_64& rng);

// The unique rank-one-perturbation unitary R = 1 + (c-1) v v* with R x = y.
// x, y must be unit vectors. Throws DegeneratePair when x = y (the map would
// be the identity, which has rank-zero perturbation).
Mat reflection_to(const Vec& x, const Vec& y);
CMat reflection_to(const CVec& x, const CVec& y);

// Haar sample on O(n), or on SO(n) after the determinant fix.
Mat sample_orthogonal(int n, bool special, std::mt19937_64& rng);

// Haar sample by the recursive reflection product: the stage-j factor maps
// e_1 to a uniform point of the sphere in dimension j. SpCompact is sampled
// by Gram-Schmidt over quaternion arithmetic instead (no reflection splitting
// is available for that family).
CMat sample_haar(const GroupKind& kind, std::mt19937_64& rng);

// Independent cross-check sampler: Gaussian matrix, QR, then the diagonal
// phase fix that makes the factorization unique. Not implemented for
// SpCompact (throws DomainError); the quaternion Gram-Schmidt path in
// sample_haar has no second route here.
CMat sample_haar_qr_oracle(const GroupKind& kind, std::mt19937_64& rng);

// Graph coordinate T = A^{-1} B of the span of the first p rows [A | B] of a
// Haar O(p+q) sample. Resamples on the measure-zero event that the span has
// no graph coordinate.
GrassCoord sample_grassmann(int p, int q, std::mt19937_64& rng);

// Corner compression U(n+m) -> U(n): alpha - beta (1+delta)^{-1} gamma for
// the block split with alpha the top-left n x n. Throws SingularMatrix when
// -1 lies in the spectrum of delta.
CMat truncate_unitary(const CMat& g, int n);

// exp(lambda sum Log(1+e^{i phi_k}) + mu sum Log(1+e^{-i phi_k})) over the
// eigenphases of g, with the principal Log. Real and >= 0 when mu = lambda.
// Requires lambda + mu > -1; throws BranchViolation when an eigenphase sits
// on the cut at pi.
Cx hua_weight(const CMat& g, double lambda, double mu);

}  // namespace invmeas
