#pragma once

#include <functional>
#include <random>
#include <vector>

#include "invmeas/core.hpp"
#include "invmeas/stats.hpp"

namespace invmeas {

// Finite-mass window [a,b] with a nonnegative intensity density. Point
// sampling inverts the cumulative table (2^14 cells, linear within a cell).
struct MeasureSpace1D {
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> density;
  double total_mass = 0.0;
  std::vector<double> cdf;  // cumulative intensity on the uniform grid
};

MeasureSpace1D make_space(double a, double b,
                          std::function<double(double)> density);
MeasureSpace1D uniform_space(double a, double b, double level);
// level * exp(rate * x); rate may be negative.
MeasureSpace1D exponential_space(double a, double b, double level, double rate);
MeasureSpace1D polynomial_space(double a, double b,
                                const std::vector<double>& coeffs);

using Configuration = std::vector<double>;

// Increasing map of the window into itself; gprime is its derivative
// relative to the intensity measure (the ordinary slope on uniform windows)
// and sigma = int (gprime - 1) dmu is cached at construction.
struct TransformG {
  std::function<double(double)> g;
  std::function<double(double)> gprime;
  double sigma = 0.0;
};

TransformG make_transform(const MeasureSpace1D& space,
                          std::function<double(double)> g,
                          std::function<double(double)> gprime);

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10);

// int h dmu over the window.
double integrate_density(const MeasureSpace1D& space,
                         const std::function<double(double)>& h);

double sample_point(const MeasureSpace1D& space, std::mt19937_64& rng);

// Count is Poisson(total mass); points are then iid from the normalized
// density, so counts over disjoint sets come out independent Poisson.
Configuration sample_poisson(const MeasureSpace1D& space, std::mt19937_64& rng);

// Mean of prod_{x in w} (1 + h(x)); reference value exp(int h dmu). Throws
// VarianceExplosion when the empirical variance exceeds rel_var_guard times
// the squared mean.
MCEstimate campbell_mc(const MeasureSpace1D& space,
                       const std::function<double(double)>& h,
                       std::size_t samples, std::mt19937_64& rng,
                       double rel_var_guard = 1e4);

// Mean of sum_{x in w} h(x); reference value int h dmu.
MCEstimate campbell_mean_mc(const MeasureSpace1D& space,
                            const std::function<double(double)>& h,
                            std::size_t samples, std::mt19937_64& rng);

// exp(-sigma) prod_j gprime(x_j): the density of the map's pushforward, so
// E[rn] = 1 and E[rn f(w)] = E[f(g^{-1} w)].
double poisson_rn(const TransformG& t, const Configuration& w);

}  // namespace invmeas
