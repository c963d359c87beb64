#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "invmeas/core.hpp"
#include "invmeas/errors.hpp"
#include "invmeas/poisson.hpp"
#include "invmeas/stats.hpp"

using namespace invmeas;

namespace {

double count_in(const Configuration& w, double lo, double hi) {
  double c = 0.0;
  for (double x : w)
    if (x >= lo && x < hi) ++c;
  return c;
}

std::vector<double> poisson_pmf_counts(double lambda, int kmax, double n) {
  std::vector<double> expected(kmax + 1);
  double p = std::exp(-lambda);
  for (int k = 0; k <= kmax; ++k) {
    expected[k] = n * p;
    p *= lambda / (k + 1);
  }
  return expected;
}

std::vector<double> count_histogram(const std::vector<int>& counts, int kmax) {
  std::vector<double> h(kmax + 1, 0.0);
  for (int c : counts) h[std::min(c, kmax)] += 1.0;
  return h;
}

}  // namespace

TEST_CASE("quadrature and window construction") {
  CHECK(adaptive_simpson([](double x) { return std::cos(x); }, 0.0, 3.0) ==
        doctest::Approx(std::sin(3.0)).epsilon(1e-12));

  MeasureSpace1D u = uniform_space(0.0, 2.0, 1.5);
  CHECK(u.total_mass == doctest::Approx(3.0).epsilon(1e-10));

  MeasureSpace1D e = exponential_space(0.0, 1.0, 2.0, -1.0);
  CHECK(e.total_mass == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-10));

  MeasureSpace1D p = polynomial_space(0.0, 1.0, {1.0, 1.0});
  CHECK(p.total_mass == doctest::Approx(1.5).epsilon(1e-10));

  CHECK_THROWS_AS(uniform_space(1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(polynomial_space(0.0, 1.0, {-0.5, 1.0}), DomainError);

  CHECK(integrate_density(p, [](double x) { return x; }) ==
        doctest::Approx(1.0 / 2.0 + 1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("zero mass gives the empty configuration") {
  auto rng = rng_stream(91, 0);
  MeasureSpace1D z = uniform_space(0.0, 1.0, 0.0);
  for (int i = 0; i < 10; ++i) CHECK(sample_poisson(z, rng).empty());
}

TEST_CASE("count law matches the Poisson pmf at mass 2") {
  auto rng = rng_stream(91, 1);
  MeasureSpace1D s = uniform_space(0.0, 2.0, 1.0);
  const int n = 100000;
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i)
    counts[i] = static_cast<int>(sample_poisson(s, rng).size());
  TestResult r = chi2_test(count_histogram(counts, 12),
                           poisson_pmf_counts(2.0, 12, n), 0.01);
  CAPTURE(r.p_value);
  CHECK(r.pass);
}

TEST_CASE("points follow the normalized density") {
  auto rng = rng_stream(91, 2);
  MeasureSpace1D s = polynomial_space(0.0, 1.0, {1.0, 1.0});  // 1 + x
  std::vector<double> points;
  while (points.size() < 20000)
    for (double x : sample_poisson(s, rng)) points.push_back(x);
  TestResult r = ks_test(points,
                         [](double x) { return (x + 0.5 * x * x) / 1.5; }, 0.01);
  CAPTURE(r.p_value);
  CHECK(r.pass);
}

TEST_CASE("counts over disjoint sets are uncorrelated") {
  auto rng = rng_stream(91, 3);
  MeasureSpace1D s = uniform_space(0.0, 2.0, 1.0);
  const int n = 20000;
  std::vector<double> na(n), nb(n);
  for (int i = 0; i < n; ++i) {
    Configuration w = sample_poisson(s, rng);
    na[i] = count_in(w, 0.0, 0.8);
    nb[i] = count_in(w, 1.2, 2.0);
  }
  CHECK(std::abs(correlation(na, nb)) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("restricting a sample to a subwindow is sampling the subwindow") {
  auto rng = rng_stream(91, 4);
  MeasureSpace1D whole = uniform_space(0.0, 2.0, 1.0);
  MeasureSpace1D part = uniform_space(0.0, 1.0, 1.0);

  const int n = 30000;
  std::vector<int> counts(n);
  std::vector<double> restricted, direct;
  for (int i = 0; i < n; ++i) {
    int c = 0;
    for (double x : sample_poisson(whole, rng))
      if (x < 1.0) {
        ++c;
        restricted.push_back(x);
      }
    counts[i] = c;
    for (double x : sample_poisson(part, rng)) direct.push_back(x);
  }

  TestResult rc = chi2_test(count_histogram(counts, 8),
                            poisson_pmf_counts(1.0, 8, n), 0.01);
  CHECK(rc.pass);
  TestResult rp = ks_two_sample(restricted, direct, 0.01);
  CAPTURE(rp.p_value);
  CHECK(rp.pass);
}

TEST_CASE("superposing independent samples sums the intensity") {
  auto rng = rng_stream(91, 5);
  MeasureSpace1D s1 = uniform_space(0.0, 1.0, 0.7);
  MeasureSpace1D s2 = uniform_space(0.0, 1.0, 1.1);
  const int n = 50000;
  std::vector<int> counts(n);
  for (int i = 0; i < n; ++i)
    counts[i] = static_cast<int>(sample_poisson(s1, rng).size() +
                                 sample_poisson(s2, rng).size());
  TestResult r = chi2_test(count_histogram(counts, 10),
                           poisson_pmf_counts(1.8, 10, n), 0.01);
  CAPTURE(r.p_value);
  CHECK(r.pass);
}

TEST_CASE("product functional matches the exponential of the integral") {
  auto rng = rng_stream(91, 6);

  MeasureSpace1D unit = uniform_space(0.0, 1.0, 1.0);
  MCEstimate zero = campbell_mc(unit, [](double) { return 0.0; }, 2000, rng);
  CHECK(zero.mean == 1.0);
  CHECK(zero.std_err == 0.0);

  MCEstimate c = campbell_mc(unit, [](double) { return 0.3; }, 100000, rng);
  CHECK(std::abs(c.mean - std::exp(0.3)) < 3.0 * c.std_err + 1e-9);

  // h = -1 on A kills every configuration meeting A: the mean is the void
  // probability exp(-mass(A)).
  MeasureSpace1D two = uniform_space(0.0, 2.0, 1.0);
  MCEstimate v = campbell_mc(
      two, [](double x) { return x < 0.5 ? -1.0 : 0.0; }, 100000, rng);
  CHECK(std::abs(v.mean - std::exp(-0.5)) < 3.0 * v.std_err + 1e-9);

  // Multiplicativity across a disjoint split of the window.
  auto h = [](double x) { return 0.25 * std::cos(3.0 * x); };
  MeasureSpace1D left = uniform_space(0.0, 1.0, 1.0);
  MeasureSpace1D right = uniform_space(1.0, 2.0, 1.0);
  MCEstimate whole = campbell_mc(two, h, 100000, rng);
  MCEstimate l = campbell_mc(left, h, 100000, rng);
  MCEstimate r = campbell_mc(right, h, 100000, rng);
  const double prod = l.mean * r.mean;
  const double se_prod = std::abs(prod) * std::hypot(l.std_err / l.mean,
                                                     r.std_err / r.mean);
  CHECK(std::abs(whole.mean - prod) <
        3.0 * std::hypot(whole.std_err, se_prod) + 1e-9);

  MeasureSpace1D four = uniform_space(0.0, 4.0, 1.0);
  CHECK_THROWS_AS(
      campbell_mc(four, [](double) { return 3.0; }, 2000, rng, 50.0),
      VarianceExplosion);
}

TEST_CASE("linear statistic has mean integral of h") {
  auto rng = rng_stream(91, 7);
  MeasureSpace1D unit = uniform_space(0.0, 1.0, 1.0);

  MCEstimate zero = campbell_mean_mc(unit, [](double) { return 0.0; }, 1000, rng);
  CHECK(zero.mean == 0.0);

  MCEstimate half = campbell_mean_mc(unit, [](double x) { return x; }, 100000, rng);
  CHECK(std::abs(half.mean - 0.5) < 3.0 * half.std_err + 1e-9);

  MeasureSpace1D lam = uniform_space(0.0, 1.0, 2.7);
  MCEstimate mean_count = campbell_mean_mc(lam, [](double) { return 1.0; },
                                           100000, rng);
  CHECK(std::abs(mean_count.mean - 2.7) < 3.0 * mean_count.std_err + 1e-9);
}

TEST_CASE("transform validation") {
  MeasureSpace1D unit = uniform_space(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(make_transform(unit, [](double x) { return 1.0 - x; },
                                 [](double) { return -1.0; }),
                  DomainError);
  CHECK_THROWS_AS(make_transform(unit, [](double x) { return x + 0.5; },
                                 [](double) { return 1.0; }),
                  DomainError);
  TransformG id = make_transform(unit, [](double x) { return x; },
                                 [](double) { return 1.0; });
  CHECK(id.sigma == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(poisson_rn(id, {0.1, 0.5, 0.9}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transform density integrates to one and moves the law") {
  auto rng = rng_stream(91, 8);
  MeasureSpace1D unit = uniform_space(0.0, 1.0, 1.0);
  auto gfun = [](double x) { return x + 0.1 * std::sin(2.0 * M_PI * x); };
  TransformG t = make_transform(unit, gfun, [](double x) {
    return 1.0 + 0.2 * M_PI * std::cos(2.0 * M_PI * x);
  });

  MCEstimate one = mc_mean(
      [&] { return poisson_rn(t, sample_poisson(unit, rng)); }, 100000);
  CHECK(std::abs(one.mean - 1.0) < 3.0 * one.std_err + 1e-9);

  // Weighted count in A equals the mass of g(A): the tilt moves intensity.
  RunningStats weighted, moved;
  for (int i = 0; i < 100000; ++i) {
    Configuration w = sample_poisson(unit, rng);
    weighted.add(poisson_rn(t, w) * count_in(w, 0.2, 0.5));
    moved.add(count_in(w, gfun(0.2), gfun(0.5)));
  }
  const double mass_ga = gfun(0.5) - gfun(0.2);
  CHECK(std::abs(weighted.mean() - mass_ga) < 3.0 * weighted.std_err() + 1e-9);
  CHECK(std::abs(moved.mean() - mass_ga) < 3.0 * moved.std_err() + 1e-9);

  // Contraction with constant derivative: both routes see 0.8 * |A|.
  TransformG affine = make_transform(unit, [](double x) { return 0.8 * x; },
                                     [](double) { return 0.8; });
  RunningStats wa, ma;
  for (int i = 0; i < 100000; ++i) {
    Configuration w = sample_poisson(unit, rng);
    wa.add(poisson_rn(affine, w) * count_in(w, 0.25, 0.75));
    ma.add(count_in(w, 0.8 * 0.25, 0.8 * 0.75));
  }
  CHECK(std::abs(wa.mean() - 0.8 * 0.5) < 3.0 * wa.std_err() + 1e-9);
  CHECK(std::abs(ma.mean() - 0.8 * 0.5) < 3.0 * ma.std_err() + 1e-9);
}
