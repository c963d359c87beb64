#pragma once

#include <random>
#include <utility>
#include <vector>

#include "invmeas/core.hpp"
#include "invmeas/stats.hpp"

namespace invmeas {

Vec sample_gauss_vector(int n, std::mt19937_64& rng);

// Shift density exp(-sum b_j x_j - 1/2 sum b_j^2): E[rn(x,b) f(x)] = E[f(x-b)].
// b may be shorter than x (missing coordinates shift by zero).
double cameron_martin_rn(const Vec& x, const Vec& b);

// Coordinate scaling x_k -> x_k/(1+lambda_k):
// prod (1+l_k) exp(-1/2 (l_k^2 + 2 l_k) x_k^2). Requires all lambda_k > -1.
// Cocycle: rn(x, compose) = rn(x, l') * rn((1+l')x, l).
double diag_rn(const Vec& x, const Vec& lambda);

// Orthogonal maps preserve the standard Gaussian: per-coordinate KS plus
// pairwise correlation bounds on u*x against fresh draws.
TestResult rotate_pushforward_test(const Mat& u, std::size_t samples,
                                   std::mt19937_64& rng, double alpha = 0.01);

// a = v1 * diag(1 + lambda) * v2 with v1, v2 orthogonal; lambda entries are
// the singular values shifted down by one.
struct GLOFactorization {
  Mat v1;
  Vec lambda;
  Mat v2;
};

GLOFactorization glo_factor(const Mat& a);

// Density of the pushforward under an invertible linear map, evaluated
// through the polar factorization a = u(1+t): sqrt(det((1+t)^T (1+t))) times
// exp(-<(t + t^T + t^T t)x, x>/2). Agrees with |det a| exp(-(|ax|^2-|x|^2)/2).
double glo_rn(const Vec& x, const Mat& a);

// Generating function exp(sum_j (x_j z_j - z_j^2 / 2)); its Taylor
// coefficients in z are the Hermite polynomials below.
Cx coherent_state(const Vec& x, const CVec& z);

// E[coherent(x,z) conj(coherent(x,u))]; reference exp(sum z_j conj(u_j)).
MCEstimateC hermite_pairing_mc(const CVec& z, const CVec& u,
                               std::size_t samples, std::mt19937_64& rng,
                               double rel_var_guard = 1e4);

// Probabilists' Hermite polynomial; squared norm k! under the standard
// normal weight.
double hermite_he(int k, double x);

// Piecewise-linear Brownian approximation: ramp coefficient plus integrated
// Haar tents, level-major, left to right. Level n tent peaks at 2^{-n/2-1}.
struct BrownianPath {
  int levels = 0;
  std::vector<double> coeffs;  // size 2^levels; coeffs[0] is the ramp
  double value(double t) const;
};

// levels <= 24. Covariance approaches min(s,t) with bias under 2^{-levels/2}.
BrownianPath brownian_sample(int levels, std::mt19937_64& rng);

// Joint Gaussian pair with standard marginals and cross-covariance
// E[y x^T] = t: sampled as y = t x + sqrt(1 - t t^T) w. Requires |t| <= 1.
struct GaussPolymorphism {
  int n = 0;
  Mat t;
  Mat noise_sqrt;
};

GaussPolymorphism gaussian_polymorphism(const Mat& t);

std::pair<Vec, Vec> sample_polymorphism(const GaussPolymorphism& p,
                                        std::mt19937_64& rng);

// E[exp(i(xi.x + eta.y))] = exp(-(|xi|^2 + |eta|^2 + 2 eta.t xi)/2).
Cx polymorphism_char(const Mat& t, const Vec& xi, const Vec& eta);

struct ClosureStage {
  double sup_error = 0.0;
  double std_err = 0.0;  // at the point attaining the sup
};

// Rotations of R^{2m} mixing coordinate j with auxiliary coordinate m+j by
// angle s*theta_j; the (x, y) marginal on the first m coordinates realizes
// the diag(cos(s theta)) pair. Errors are sups over the test points of the
// distance between the empirical characteristic function and the target
// diag(cos theta) formula; they shrink as s -> 1.
std::vector<ClosureStage> polymorphism_closure_errors(
    const Vec& theta, const std::vector<double>& schedule,
    const std::vector<std::pair<Vec, Vec>>& test_points, std::size_t samples,
    std::mt19937_64& rng);

}  // namespace invmeas
