#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "invmeas/core.hpp"
#include "invmeas/errors.hpp"

namespace invmeas {

struct MCEstimate {
  double mean = 0.0;
  double std_err = 0.0;  // sample stdev / sqrt(count)
  std::size_t count = 0;
};

// Complex-valued estimator; std_err bounds both components.
struct MCEstimateC {
  Cx mean{0.0, 0.0};
  double std_err = 0.0;
  std::size_t count = 0;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.01;
  bool pass = true;
};

// Welford accumulator; merge() makes parallel reduction safe.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) { *this = o; return; }
    double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    double d = o.mean_ - mean_;
    mean_ += d * nb / (na + nb);
    m2_ += o.m2_ + d * d * na * nb / (na + nb);
    n_ += o.n_;
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_err() const;
  MCEstimate estimate() const { return {mean(), std_err(), count()}; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

template <class F>
MCEstimate mc_mean(F&& stream, std::size_t n) {
  RunningStats acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(stream());
  return acc.estimate();
}

template <class F>
MCEstimateC mc_mean_complex(F&& stream, std::size_t n) {
  RunningStats re, im;
  for (std::size_t i = 0; i < n; ++i) {
    Cx v = stream();
    re.add(v.real());
    im.add(v.imag());
  }
  double se = std::sqrt(re.std_err() * re.std_err() + im.std_err() * im.std_err());
  return {Cx(re.mean(), im.mean()), se, n};
}

// Survival function of the Kolmogorov distribution.
double ks_distribution_q(double lambda);

// One-sample Kolmogorov-Smirnov against a continuous CDF. The p-value is the
// asymptotic one evaluated at lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D;
// the n-dependent factor is Stephens' small-sample correction, accurate to a
// few percent already at n = 100, which is why fewer samples are rejected.
TestResult ks_test(std::vector<double> samples,
                   const std::function<double(double)>& cdf,
                   double alpha = 0.01);

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                         double alpha = 0.01);

// Pearson chi-square. Bins with expected count < 5 are pooled into their
// right neighbor (the trailing remainder joins the last kept bin); degrees of
// freedom = kept bins - 1 - ddof.
TestResult chi2_test(const std::vector<double>& counts,
                     const std::vector<double>& expected, double alpha = 0.01,
                     int ddof = 0);

struct Histogram {
  std::vector<double> edges;   // size bins+1
  std::vector<double> counts;  // size bins
};
Histogram make_histogram(const std::vector<double>& samples, double lo,
                         double hi, int bins);

double normal_cdf(double x);
double cauchy_cdf(double x);
// CDF of one coordinate of a uniform point on the unit sphere in R^n.
double sphere_coordinate_cdf(double t, int n);
double chi2_sf(double stat, double dof);

// Pearson correlation of paired samples.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace invmeas
