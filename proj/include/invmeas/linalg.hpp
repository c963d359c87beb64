#pragma once

#include <vector>

#include "invmeas/core.hpp"
#include "invmeas/errors.hpp"

namespace invmeas {

// T = (1+g)^{-1}(1-g). Involutive on its domain; takes rotations with no
// eigenvalue -1 to antisymmetric matrices. cond_bound gates the LU solve.
Mat cayley(const Mat& g, double cond_bound = 1e12);
CMat cayley(const CMat& g, double cond_bound = 1e12);

// Pivot-ratio condition estimate of a partial-pivoting LU of m. The library
// convention everywhere: "invertible" means this estimate stays below 1e12.
double solve_condition(const Mat& m);
double solve_condition(const CMat& m);

// Determinant of [[A,B],[C,D]] (A = top-left p x p) through the Schur
// complement of whichever diagonal block is invertible.
double block_det(const Mat& m, int p);
Cx block_det(const CMat& m, int p);

// Row-vector fractional-linear action on graph coordinates:
// T' = (alpha + T gamma)^{-1} (beta + T delta), with g split after
// p = T.rows() rows/cols.
Mat moebius(const Mat& g, const Mat& t);
CMat moebius(const CMat& g, const CMat& t);

// Signed determinant of the differential of the action above on R^{p x q}:
// det(alpha + T gamma)^{-(p+q)} * det(g)^p.
double moebius_jacobian(const Mat& g, const Mat& t);

// Delta(g) = |det Ad(g)| on span(basis). Conjugation must keep each basis
// element inside the span (residual-checked).
double modular_character(const std::vector<Mat>& basis, const Mat& g,
                         double tol = 1e-8);

// Unitary block matrix [[a,b],[c,d]] with output/input size n (block a) and
// coupling size m.rows()-n (block d).
struct Colligation {
  CMat m;
  int n = 0;

  Colligation(CMat matrix, int inner, double unitary_tol = 1e-8);
  int coupling() const { return static_cast<int>(m.rows()) - n; }
  CMat a() const { return m.topLeftCorner(n, n); }
  CMat b() const { return m.topRightCorner(n, coupling()); }
  CMat c() const { return m.bottomLeftCorner(coupling(), n); }
  CMat d() const { return m.bottomRightCorner(coupling(), coupling()); }
};

// chi(lambda) = a + lambda b (1 - lambda d)^{-1} c. Invariant under unitary
// conjugation of the coupling space; unitary for |lambda| = 1, contractive
// inside the disk.
CMat colligation_char(const Colligation& c, Cx lambda);

// Coupling spaces concatenate; characteristic functions multiply:
// chi_{product} = chi_{c1} * chi_{c2}.
Colligation colligation_product(const Colligation& c1, const Colligation& c2);

// Eigenvalue phases of a unitary matrix, sorted ascending in [0, 2*pi).
std::vector<double> unitary_eigenphases(const CMat& u);

}  // namespace invmeas
