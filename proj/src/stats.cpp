#include "invmeas/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace invmeas {

double RunningStats::std_err() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

double ks_distribution_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Dual theta-series form; the alternating series converges slowly here.
    double t = std::exp(-M_PI * M_PI / (8.0 * lambda * lambda));
    double cdf = std::sqrt(2.0 * M_PI) / lambda *
                 (t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0));
    return 1.0 - cdf;
  }
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += 2.0 * sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::max(0.0, std::min(1.0, q));
}

namespace {
TestResult ks_result(double d, double n_eff, double alpha) {
  double rn = std::sqrt(n_eff);
  double lambda = (rn + 0.12 + 0.11 / rn) * d;
  TestResult r;
  r.statistic = d;
  r.p_value = ks_distribution_q(lambda);
  r.alpha = alpha;
  r.pass = r.p_value > alpha;
  return r;
}
}  // namespace

TestResult ks_test(std::vector<double> samples,
                   const std::function<double(double)>& cdf, double alpha) {
  if (samples.size() < 100) throw TooFewSamples("ks_test needs >= 100 samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
  }
  return ks_result(d, n, alpha);
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b,
                         double alpha) {
  if (a.size() < 100 || b.size() < 100)
    throw TooFewSamples("ks_two_sample needs >= 100 samples per side");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return ks_result(d, na * nb / (na + nb), alpha);
}

double chi2_sf(double stat, double dof) {
  if (dof <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

TestResult chi2_test(const std::vector<double>& counts,
                     const std::vector<double>& expected, double alpha,
                     int ddof) {
  if (counts.size() != expected.size() || counts.empty())
    throw SizeMismatch("chi2_test: counts vs expected");
  std::vector<double> oc, ec;
  double co = 0.0, ce = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    co += counts[i];
    ce += expected[i];
    if (ce >= 5.0) {
      oc.push_back(co);
      ec.push_back(ce);
      co = ce = 0.0;
    }
  }
  if (ce > 0.0) {
    if (ec.empty()) {
      oc.push_back(co);
      ec.push_back(ce);
    } else {
      oc.back() += co;
      ec.back() += ce;
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < oc.size(); ++i) {
    double d = oc[i] - ec[i];
    stat += d * d / ec[i];
  }
  int dof = static_cast<int>(oc.size()) - 1 - ddof;
  TestResult r;
  r.statistic = stat;
  r.p_value = dof > 0 ? chi2_sf(stat, dof) : 1.0;
  r.alpha = alpha;
  r.pass = r.p_value > alpha;
  return r;
}

Histogram make_histogram(const std::vector<double>& samples, double lo,
                         double hi, int bins) {
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0.0);
  for (int i = 0; i <= bins; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  for (double x : samples) {
    if (x < lo || x >= hi) continue;
    int b = static_cast<int>((x - lo) / (hi - lo) * bins);
    if (b >= 0 && b < bins) h.counts[b] += 1.0;
  }
  return h;
}

double normal_cdf(double x) {
  return 0.5 * boost::math::erfc(-x / std::sqrt(2.0));
}

double cauchy_cdf(double x) { return 0.5 + std::atan(x) / M_PI; }

double sphere_coordinate_cdf(double t, int n) {
  // Density on [-1,1] is proportional to (1-t^2)^((n-3)/2); the CDF is the
  // regularized incomplete beta of (t+1)/2 with a = b = (n-1)/2.
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double ab = (n - 1) / 2.0;
  return boost::math::ibeta(ab, ab, (t + 1.0) / 2.0);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw SizeMismatch("correlation: paired samples");
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  if (sa == 0.0 || sb == 0.0) return 0.0;
  return sab / std::sqrt(sa * sb);
}

}  // namespace invmeas
