#include "invmeas/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace invmeas {
namespace {

// Pivot-ratio condition estimate from a partial-pivoting LU. Crude but cheap;
// only used to gate solves, never for the result itself.
template <class M>
double lu_cond_estimate(const Eigen::PartialPivLU<M>& lu) {
  auto d = lu.matrixLU().diagonal();
  double mx = 0.0, mn = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double a = std::abs(d[i]);
    mx = std::max(mx, a);
    mn = std::min(mn, a);
  }
  if (mn == 0.0) return std::numeric_limits<double>::infinity();
  return mx / mn;
}

template <class M>
double solve_cond_impl(const M& m) {
  Eigen::PartialPivLU<M> lu(m);
  return lu_cond_estimate(lu);
}

template <class M>
M cayley_impl(const M& g, double cond_bound) {
  M one = M::Identity(g.rows(), g.cols());
  Eigen::PartialPivLU<M> lu(one + g);
  if (lu_cond_estimate(lu) >= cond_bound)
    throw SingularMatrix("cayley: 1+g numerically singular");
  return lu.solve(one - g);
}

template <class M>
typename M::Scalar block_det_impl(const M& m, int p) {
  const int q = static_cast<int>(m.rows()) - p;
  if (p < 0 || q < 0) throw SizeMismatch("block_det: bad split");
  M a = m.topLeftCorner(p, p), b = m.topRightCorner(p, q);
  M c = m.bottomLeftCorner(q, p), d = m.bottomRightCorner(q, q);
  constexpr double kCond = 1e12;
  {
    Eigen::PartialPivLU<M> lu(a);
    if (p == 0 || lu_cond_estimate(lu) < kCond) {
      typename M::Scalar da = p == 0 ? typename M::Scalar(1) : lu.determinant();
      M schur = d - c * lu.solve(b);
      return da * schur.determinant();
    }
  }
  {
    Eigen::PartialPivLU<M> lu(d);
    if (q == 0 || lu_cond_estimate(lu) < kCond) {
      typename M::Scalar dd = q == 0 ? typename M::Scalar(1) : lu.determinant();
      M schur = a - b * lu.solve(c);
      return dd * schur.determinant();
    }
  }
  throw BothBlocksSingular("block_det: neither diagonal block invertible");
}

template <class M>
M moebius_impl(const M& g, const M& t) {
  const int p = static_cast<int>(t.rows()), q = static_cast<int>(t.cols());
  if (g.rows() != p + q || g.cols() != p + q)
    throw SizeMismatch("moebius: g must be (p+q) x (p+q)");
  M alpha = g.topLeftCorner(p, p), beta = g.topRightCorner(p, q);
  M gamma = g.bottomLeftCorner(q, p), delta = g.bottomRightCorner(q, q);
  Eigen::PartialPivLU<M> lu(alpha + t * gamma);
  if (lu_cond_estimate(lu) >= 1e12)
    throw SingularMatrix("moebius: alpha + T gamma singular (chart boundary)");
  return lu.solve(beta + t * delta);
}

}  // namespace

Mat cayley(const Mat& g, double cond_bound) { return cayley_impl(g, cond_bound); }
CMat cayley(const CMat& g, double cond_bound) { return cayley_impl(g, cond_bound); }

double solve_condition(const Mat& m) { return solve_cond_impl(m); }
double solve_condition(const CMat& m) { return solve_cond_impl(m); }

double block_det(const Mat& m, int p) { return block_det_impl(m, p); }
Cx block_det(const CMat& m, int p) { return block_det_impl(m, p); }

Mat moebius(const Mat& g, const Mat& t) { return moebius_impl(g, t); }
CMat moebius(const CMat& g, const CMat& t) { return moebius_impl(g, t); }

double moebius_jacobian(const Mat& g, const Mat& t) {
  const int p = static_cast<int>(t.rows()), q = static_cast<int>(t.cols());
  if (g.rows() != p + q || g.cols() != p + q)
    throw SizeMismatch("moebius_jacobian: g must be (p+q) x (p+q)");
  Mat alpha = g.topLeftCorner(p, p);
  Mat gamma = g.bottomLeftCorner(q, p);
  Eigen::PartialPivLU<Mat> lu(alpha + t * gamma);
  if (lu_cond_estimate(lu) >= 1e12)
    throw SingularMatrix("moebius_jacobian: alpha + T gamma singular");
  double dm = lu.determinant();
  return std::pow(dm, -(p + q)) * std::pow(g.determinant(), p);
}

double modular_character(const std::vector<Mat>& basis, const Mat& g,
                         double tol) {
  if (basis.empty()) throw SizeMismatch("modular_character: empty basis");
  const int n = static_cast<int>(g.rows());
  const int d = static_cast<int>(basis.size());
  for (const Mat& x : basis)
    if (x.rows() != n || x.cols() != n)
      throw SizeMismatch("modular_character: basis shape vs g");
  Eigen::PartialPivLU<Mat> glu(g);
  if (lu_cond_estimate(glu) >= 1e12)
    throw SingularMatrix("modular_character: g not invertible");

  Mat span(n * n, d);
  for (int i = 0; i < d; ++i)
    span.col(i) = Eigen::Map<const Vec>(basis[i].data(), n * n);
  Eigen::ColPivHouseholderQR<Mat> qr(span);
  if (qr.rank() < d)
    throw DomainError("modular_character: basis not linearly independent");

  Mat ad(d, d);
  for (int i = 0; i < d; ++i) {
    Mat y = g * basis[i] * glu.inverse();
    Vec yv = Eigen::Map<const Vec>(y.data(), n * n);
    Vec coeff = qr.solve(yv);
    double resid = (span * coeff - yv).lpNorm<Eigen::Infinity>();
    if (resid > tol * (1.0 + yv.lpNorm<Eigen::Infinity>()))
      throw NotInvariant("modular_character: Ad(g) leaves span(basis)");
    ad.col(i) = coeff;
  }
  return std::abs(ad.determinant());
}

Colligation::Colligation(CMat matrix, int inner, double unitary_tol)
    : m(std::move(matrix)), n(inner) {
  if (m.rows() != m.cols() || n < 0 || n > m.rows())
    throw SizeMismatch("colligation: inner size vs matrix");
  CMat gram = m.adjoint() * m - CMat::Identity(m.rows(), m.cols());
  if (gram.cwiseAbs().maxCoeff() > unitary_tol)
    throw DomainError("colligation: matrix not unitary within tol");
}

CMat colligation_char(const Colligation& c, Cx lambda) {
  if (c.coupling() == 0) return c.a();
  const int k = c.coupling();
  CMat res = CMat::Identity(k, k) - lambda * c.d();
  Eigen::PartialPivLU<CMat> lu(res);
  if (lu_cond_estimate(lu) >= 1e12)
    throw SingularMatrix("colligation_char: pole of chi");
  return c.a() + lambda * c.b() * lu.solve(c.c());
}

Colligation colligation_product(const Colligation& c1, const Colligation& c2) {
  if (c1.n != c2.n) throw SizeMismatch("colligation_product: inner sizes");
  const int n = c1.n, k1 = c1.coupling(), k2 = c2.coupling();
  CMat out(n + k1 + k2, n + k1 + k2);
  out.setZero();
  out.block(0, 0, n, n) = c1.a() * c2.a();
  out.block(0, n, n, k1) = c1.b();
  out.block(0, n + k1, n, k2) = c1.a() * c2.b();
  out.block(n, 0, k1, n) = c1.c() * c2.a();
  out.block(n, n, k1, k1) = c1.d();
  out.block(n, n + k1, k1, k2) = c1.c() * c2.b();
  out.block(n + k1, 0, k2, n) = c2.c();
  out.block(n + k1, n + k1, k2, k2) = c2.d();
  return Colligation(std::move(out), n);
}

std::vector<double> unitary_eigenphases(const CMat& u) {
  Eigen::ComplexEigenSolver<CMat> es(u, /*computeEigenvectors=*/false);
  std::vector<double> phases;
  phases.reserve(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double a = std::arg(es.eigenvalues()[i]);
    if (a < 0) a += 2.0 * M_PI;
    if (a >= 2.0 * M_PI) a -= 2.0 * M_PI;
    phases.push_back(a);
  }
  std::sort(phases.begin(), phases.end());
  return phases;
}

}  // namespace invmeas
