#include "invmeas/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "invmeas/errors.hpp"

namespace invmeas {

namespace {

constexpr int kCdfCells = 1 << 14;
constexpr int kValidationGrid = 512;

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) < 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (!(a <= b)) throw DomainError("reversed interval");
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

MeasureSpace1D make_space(double a, double b,
                          std::function<double(double)> density) {
  if (!(a < b)) throw DomainError("window must have positive length");
  MeasureSpace1D s;
  s.a = a;
  s.b = b;
  s.density = std::move(density);

  const double dx = (b - a) / kCdfCells;
  s.cdf.resize(kCdfCells + 1);
  s.cdf[0] = 0.0;
  double prev = s.density(a);
  if (!(prev >= 0.0)) throw DomainError("density must be nonnegative");
  for (int i = 1; i <= kCdfCells; ++i) {
    const double cur = s.density(a + i * dx);
    if (!(cur >= 0.0)) throw DomainError("density must be nonnegative");
    s.cdf[i] = s.cdf[i - 1] + 0.5 * (prev + cur) * dx;
    prev = cur;
  }
  s.total_mass = adaptive_simpson(s.density, a, b);
  return s;
}

MeasureSpace1D uniform_space(double a, double b, double level) {
  return make_space(a, b, [level](double) { return level; });
}

MeasureSpace1D exponential_space(double a, double b, double level,
                                 double rate) {
  return make_space(
      a, b, [level, rate](double x) { return level * std::exp(rate * x); });
}

MeasureSpace1D polynomial_space(double a, double b,
                                const std::vector<double>& coeffs) {
  return make_space(a, b, [coeffs](double x) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
  });
}

double integrate_density(const MeasureSpace1D& space,
                         const std::function<double(double)>& h) {
  return adaptive_simpson(
      [&](double x) { return h(x) * space.density(x); }, space.a, space.b);
}

TransformG make_transform(const MeasureSpace1D& space,
                          std::function<double(double)> g,
                          std::function<double(double)> gprime) {
  const double dx = (space.b - space.a) / kValidationGrid;
  double prev = g(space.a);
  for (int i = 0; i <= kValidationGrid; ++i) {
    const double x = space.a + i * dx;
    const double gx = g(x);
    if (!(gprime(x) > 0.0)) throw DomainError("derivative must be positive");
    if (gx < space.a - 1e-9 || gx > space.b + 1e-9)
      throw DomainError("map must stay inside the window");
    if (i > 0 && !(gx > prev)) throw DomainError("map must be increasing");
    prev = gx;
  }
  TransformG t;
  t.sigma = adaptive_simpson(
      [&](double x) { return (gprime(x) - 1.0) * space.density(x); }, space.a,
      space.b);
  t.g = std::move(g);
  t.gprime = std::move(gprime);
  return t;
}

double sample_point(const MeasureSpace1D& space, std::mt19937_64& rng) {
  const double total = space.cdf.back();
  if (!(total > 0.0)) throw DomainError("cannot sample from zero mass");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double target = unif(rng) * total;
  const auto it =
      std::upper_bound(space.cdf.begin(), space.cdf.end() - 1, target);
  const int cell = static_cast<int>(it - space.cdf.begin()) - 1;
  const double lo = space.cdf[cell], hi = space.cdf[cell + 1];
  const double frac = hi > lo ? (target - lo) / (hi - lo) : 0.5;
  const double dx = (space.b - space.a) / kCdfCells;
  return space.a + (cell + frac) * dx;
}

Configuration sample_poisson(const MeasureSpace1D& space,
                             std::mt19937_64& rng) {
  if (space.total_mass <= 0.0) return {};
  std::poisson_distribution<int> count(space.total_mass);
  const int k = count(rng);
  Configuration w(k);
  for (int i = 0; i < k; ++i) w[i] = sample_point(space, rng);
  return w;
}

MCEstimate campbell_mc(const MeasureSpace1D& space,
                       const std::function<double(double)>& h,
                       std::size_t samples, std::mt19937_64& rng,
                       double rel_var_guard) {
  RunningStats acc;
  for (std::size_t i = 0; i < samples; ++i) {
    double prod = 1.0;
    for (double x : sample_poisson(space, rng)) prod *= 1.0 + h(x);
    acc.add(prod);
  }
  const double m = acc.mean();
  if (acc.variance() > rel_var_guard * m * m)
    throw VarianceExplosion("relative variance of the product exceeds guard");
  return acc.estimate();
}

MCEstimate campbell_mean_mc(const MeasureSpace1D& space,
                            const std::function<double(double)>& h,
                            std::size_t samples, std::mt19937_64& rng) {
  RunningStats acc;
  for (std::size_t i = 0; i < samples; ++i) {
    double sum = 0.0;
    for (double x : sample_poisson(space, rng)) sum += h(x);
    acc.add(sum);
  }
  return acc.estimate();
}

double poisson_rn(const TransformG& t, const Configuration& w) {
  double prod = 1.0;
  for (double x : w) prod *= t.gprime(x);
  return std::exp(-t.sigma) * prod;
}

}  // namespace invmeas
