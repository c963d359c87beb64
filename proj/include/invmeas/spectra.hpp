#pragma once

#include <functional>
#include <random>
#include <vector>

#include "invmeas/core.hpp"
#include "invmeas/haar.hpp"
#include "invmeas/stats.hpp"

namespace invmeas {

// Signature of a rational character: weakly decreasing integers, possibly
// negative.
struct Partition {
  std::vector<int> parts;
};

// Eigenphase parameters of one matrix in the family's fundamental domain:
// U(n) keeps all n phases sorted in [0,2pi); the other families fold the
// conjugate pairs into [0,pi] (the odd orthogonal group drops its fixed
// eigenvalue 1). Rank = number of returned parameters.
std::vector<double> weyl_phases(const GroupKind& kind, const CMat& g);

int weyl_rank(const GroupKind& kind);

// Joint eigenphase density on the ordered fundamental simplex, normalized to
// total mass 1. U(n) carries the closed form (2pi)^{-n} prod |e^{i phi_k} -
// e^{i phi_l}|^2; the other families are normalized by cached quadrature.
// Throws DomainError for phases outside the domain or the O family.
double weyl_density(const GroupKind& kind, const std::vector<double>& phi);

// Integral of a symmetric statistic f against the eigenphase density, by
// tensor Gauss-Legendre quadrature over the fundamental cube.
double weyl_expectation(const GroupKind& kind,
                        const std::function<double(const std::vector<double>&)>& f,
                        int nodes_per_axis = 48);

// P(all eigenphase parameters >= t): tail of the smallest parameter. Bin
// masses of the smallest parameter come from differences of this tail.
double weyl_min_phase_tail(const GroupKind& kind, double t,
                           int nodes_per_axis = 48);

// Unnormalized squared-Vandermonde mass over the full torus [0,2pi]^n; equals
// n! (2pi)^n.
double torus_vandermonde_mass(int n, int nodes_per_axis = 48);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int k, double a, double b, Vec& nodes, Vec& weights);

// Ratio of alternants det(z_i^{alpha_j + n - j}) / det(z_i^{n - j}). Points
// closer than 1e-8 take a deterministic perturbation path with a Richardson
// extrapolation consistency check; DegeneratePoints when that fails.
Cx schur(const Partition& alpha, const CVec& z);

// Gram matrix of Schur functions under the eigenvalue law of Haar U(n),
// estimated from one shared Monte Carlo stream; entry (i, j) estimates
// <s_{alpha_i}, s_{alpha_j}> whose exact value is delta_ij.
std::vector<std::vector<MCEstimateC>> schur_gram_mc(
    const std::vector<Partition>& alphas, int n, std::size_t samples,
    std::mt19937_64& rng);

MCEstimateC schur_inner_mc(const Partition& alpha, const Partition& beta,
                           int n, std::size_t samples, std::mt19937_64& rng);

// E[g_ij conj(g_kl)] over Haar U(n) for all index tuples; exact value
// delta_ik delta_jl / n. Layout: ((i*n + j)*n + k)*n + l.
std::vector<MCEstimateC> matrix_element_orthogonality_mc(int n,
                                                         std::size_t samples,
                                                         std::mt19937_64& rng);

// Rotation-invariant Gaussian self-adjoint ensemble over the division algebra
// of dimension d in {1, 2, 4}; eigenvalue density prod |l_k - l_l|^d
// exp(-sum l^2/2). d = 4 is stored as its 2n x 2n complex embedding with
// doubled spectrum.
struct HermitianSample {
  int d = 2;
  int n = 0;
  CMat h;
};

HermitianSample sample_hermitian_invariant(int d, int n, std::mt19937_64& rng);

// The n simple eigenvalues, ascending (the doubled d = 4 spectrum is paired
// and averaged).
Vec hermitian_eigenvalues(const HermitianSample& x);

// Spectra of the nested corners [X]_p for p = 1..n; entry p-1 holds p
// ascending values. Consecutive levels interlace.
std::vector<Vec> corner_spectra(const HermitianSample& x);

}  // namespace invmeas
