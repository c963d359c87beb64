#include "invmeas/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "invmeas/errors.hpp"

namespace invmeas {

namespace {

constexpr double kSingularRatio = 1e-12;

Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalDegeneracy("eigensolver failed");
  Vec ev = es.eigenvalues();
  // Eigenvalues at roundoff scale are treated as exact zeros so that
  // rank-deficient covariances stay on their support.
  for (int i = 0; i < ev.size(); ++i)
    ev[i] = ev[i] > 1e-13 ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

Vec sample_gauss_vector(int n, std::mt19937_64& rng) {
  if (n < 0) throw DomainError("negative dimension");
  std::normal_distribution<double> nd;
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = nd(rng);
  return x;
}

double cameron_martin_rn(const Vec& x, const Vec& b) {
  if (b.size() > x.size()) throw SizeMismatch("shift longer than vector");
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += b[i] * x[i] + 0.5 * b[i] * b[i];
  return std::exp(-s);
}

double diag_rn(const Vec& x, const Vec& lambda) {
  if (lambda.size() > x.size()) throw SizeMismatch("scaling longer than vector");
  double logrn = 0.0;
  for (int i = 0; i < lambda.size(); ++i) {
    const double l = lambda[i];
    if (!(l > -1.0)) throw DomainError("entries must exceed -1");
    logrn += std::log1p(l) - 0.5 * (l * l + 2.0 * l) * x[i] * x[i];
  }
  return std::exp(logrn);
}

TestResult rotate_pushforward_test(const Mat& u, std::size_t samples,
                                   std::mt19937_64& rng, double alpha) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n) throw SizeMismatch("square matrix required");
  if ((u.transpose() * u - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("matrix is not orthogonal");

  std::vector<std::vector<double>> coord(n);
  for (std::size_t i = 0; i < samples; ++i) {
    Vec y = u * sample_gauss_vector(n, rng);
    for (int j = 0; j < n; ++j) coord[j].push_back(y[j]);
  }

  TestResult out;
  out.alpha = alpha;
  out.pass = true;
  out.p_value = 1.0;
  for (int j = 0; j < n; ++j) {
    TestResult r = ks_test(coord[j], normal_cdf, alpha);
    out.statistic = std::max(out.statistic, r.statistic);
    out.p_value = std::min(out.p_value, r.p_value);
    out.pass = out.pass && r.pass;
  }
  const double bound = 3.0 / std::sqrt(double(samples));
  for (int j = 0; j < n && out.pass; ++j)
    for (int k = j + 1; k < n && out.pass; ++k)
      out.pass = std::abs(correlation(coord[j], coord[k])) < bound;
  return out;
}

GLOFactorization glo_factor(const Mat& a) {
  if (a.rows() != a.cols()) throw SizeMismatch("square matrix required");
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  if (sv.size() == 0 || sv[sv.size() - 1] <= kSingularRatio * sv[0] ||
      sv[sv.size() - 1] == 0.0)
    throw SingularMatrix("factorization needs an invertible matrix");
  GLOFactorization f;
  f.v1 = svd.matrixU();
  f.v2 = svd.matrixV().transpose();
  f.lambda = sv.array() - 1.0;
  return f;
}

double glo_rn(const Vec& x, const Mat& a) {
  const int n = static_cast<int>(a.rows());
  if (x.size() != n) throw SizeMismatch("vector dimension mismatch");
  GLOFactorization f = glo_factor(a);

  // Symmetric polar factor of a; t = p - 1 is the GLO perturbation.
  const Mat p = f.v2.transpose() * (f.lambda.array() + 1.0).matrix().asDiagonal() * f.v2;
  const Mat t = p - Mat::Identity(n, n);
  const Mat sym = t + t.transpose() + t.transpose() * t;
  const double quad = x.dot(sym * x);
  const double det2 =
      ((Mat::Identity(n, n) + t).transpose() * (Mat::Identity(n, n) + t))
          .determinant();
  return std::sqrt(det2) * std::exp(-0.5 * quad);
}

Cx coherent_state(const Vec& x, const CVec& z) {
  if (z.size() > x.size()) throw SizeMismatch("parameter longer than vector");
  Cx s = 0.0;
  for (int i = 0; i < z.size(); ++i) s += x[i] * z[i] - 0.5 * z[i] * z[i];
  return std::exp(s);
}

MCEstimateC hermite_pairing_mc(const CVec& z, const CVec& u,
                               std::size_t samples, std::mt19937_64& rng,
                               double rel_var_guard) {
  if (z.size() != u.size()) throw SizeMismatch("parameter dimension mismatch");
  const int n = static_cast<int>(z.size());
  RunningStats re, im;
  for (std::size_t i = 0; i < samples; ++i) {
    Vec x = sample_gauss_vector(n, rng);
    Cx v = coherent_state(x, z) * std::conj(coherent_state(x, u));
    re.add(v.real());
    im.add(v.imag());
  }
  const double mean2 = re.mean() * re.mean() + im.mean() * im.mean();
  if (re.variance() + im.variance() > rel_var_guard * mean2)
    throw VarianceExplosion("relative variance of the pairing exceeds guard");
  const double se = std::sqrt(re.std_err() * re.std_err() +
                              im.std_err() * im.std_err());
  return {Cx(re.mean(), im.mean()), se, samples};
}

double hermite_he(int k, double x) {
  if (k < 0) throw DomainError("negative degree");
  double prev = 1.0, cur = x;
  if (k == 0) return prev;
  for (int m = 1; m < k; ++m) {
    const double next = x * cur - m * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double BrownianPath::value(double t) const {
  if (t < 0.0 || t > 1.0) throw DomainError("time outside [0,1]");
  double b = coeffs[0] * t;
  for (int n = 0; n < levels; ++n) {
    const int cells = 1 << n;
    const int k = std::min(static_cast<int>(t * cells), cells - 1);
    const double left = double(k) / cells;
    const double mid = left + 0.5 / cells;
    const double right = left + 1.0 / cells;
    const double slope = std::pow(2.0, 0.5 * n);
    const double tent = t <= mid ? slope * (t - left) : slope * (right - t);
    b += coeffs[cells + k] * tent;
  }
  return b;
}

BrownianPath brownian_sample(int levels, std::mt19937_64& rng) {
  if (levels < 0 || levels > 24) throw DomainError("levels must be in 0..24");
  BrownianPath p;
  p.levels = levels;
  p.coeffs.resize(std::size_t(1) << levels);
  std::normal_distribution<double> nd;
  for (double& c : p.coeffs) c = nd(rng);
  return p;
}

GaussPolymorphism gaussian_polymorphism(const Mat& t) {
  if (t.rows() != t.cols()) throw SizeMismatch("square matrix required");
  const int n = static_cast<int>(t.rows());
  Eigen::JacobiSVD<Mat> svd(t);
  if (svd.singularValues().size() > 0 &&
      svd.singularValues()[0] > 1.0 + 1e-10)
    throw NotContraction("operator norm exceeds one");
  GaussPolymorphism p;
  p.n = n;
  p.t = t;
  p.noise_sqrt = psd_sqrt(Mat(Mat::Identity(n, n) - t * t.transpose()));
  return p;
}

std::pair<Vec, Vec> sample_polymorphism(const GaussPolymorphism& p,
                                        std::mt19937_64& rng) {
  Vec x = sample_gauss_vector(p.n, rng);
  Vec y = p.t * x + p.noise_sqrt * sample_gauss_vector(p.n, rng);
  return {std::move(x), std::move(y)};
}

Cx polymorphism_char(const Mat& t, const Vec& xi, const Vec& eta) {
  if (xi.size() != t.cols() || eta.size() != t.rows())
    throw SizeMismatch("argument dimension mismatch");
  const double q = xi.squaredNorm() + eta.squaredNorm() + 2.0 * eta.dot(t * xi);
  return std::exp(Cx(-0.5 * q, 0.0));
}

std::vector<ClosureStage> polymorphism_closure_errors(
    const Vec& theta, const std::vector<double>& schedule,
    const std::vector<std::pair<Vec, Vec>>& test_points, std::size_t samples,
    std::mt19937_64& rng) {
  const int m = static_cast<int>(theta.size());
  for (const auto& [xi, eta] : test_points)
    if (xi.size() != m || eta.size() != m)
      throw SizeMismatch("test point dimension mismatch");
  const Mat target = Vec(theta.array().cos()).asDiagonal();

  std::vector<ClosureStage> out;
  for (double s : schedule) {
    const Vec c = (s * theta.array()).cos();
    const Vec sn = (s * theta.array()).sin();

    std::vector<RunningStats> re(test_points.size()), im(test_points.size());
    for (std::size_t i = 0; i < samples; ++i) {
      const Vec x = sample_gauss_vector(m, rng);
      const Vec w = sample_gauss_vector(m, rng);
      // First m coordinates of the 2m rotation applied to (x, w).
      const Vec y = c.cwiseProduct(x) + sn.cwiseProduct(w);
      for (std::size_t k = 0; k < test_points.size(); ++k) {
        const double phase =
            test_points[k].first.dot(x) + test_points[k].second.dot(y);
        re[k].add(std::cos(phase));
        im[k].add(std::sin(phase));
      }
    }

    ClosureStage stage;
    for (std::size_t k = 0; k < test_points.size(); ++k) {
      const Cx emp(re[k].mean(), im[k].mean());
      const Cx want =
          polymorphism_char(target, test_points[k].first, test_points[k].second);
      const double err = std::abs(emp - want);
      if (err >= stage.sup_error) {
        stage.sup_error = err;
        stage.std_err = std::sqrt(re[k].std_err() * re[k].std_err() +
                                  im[k].std_err() * im[k].std_err());
      }
    }
    out.push_back(stage);
  }
  return out;
}

}  // namespace invmeas
