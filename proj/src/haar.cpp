#include "invmeas/haar.hpp"

#include <cmath>

#include "invmeas/errors.hpp"
#include "invmeas/linalg.hpp"

namespace invmeas {
namespace {

constexpr double kCondBound = 1e12;
constexpr int kMaxResample = 1000;

// Quaternion a + b j over its complex components, with j z = conj(z) j.
struct Quat {
  Cx a, b;
};

Quat operator*(const Quat& p, const Quat& q) {
  return {p.a * q.a - p.b * std::conj(q.b), p.a * q.b + p.b * std::conj(q.a)};
}

Quat operator+(const Quat& p, const Quat& q) { return {p.a + q.a, p.b + q.b}; }
Quat operator-(const Quat& p, const Quat& q) { return {p.a - q.a, p.b - q.b}; }
Quat qconj(const Quat& p) { return {std::conj(p.a), -p.b}; }
double qnorm2(const Quat& p) { return std::norm(p.a) + std::norm(p.b); }

template <class V>
V unit_sphere(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  V v(n);
  for (int tries = 0; tries < kMaxResample; ++tries) {
    for (int i = 0; i < n; ++i) {
      if constexpr (std::is_same_v<V, Vec>)
        v[i] = nd(rng);
      else
        v[i] = Cx(nd(rng), nd(rng));
    }
    double nrm = v.norm();
    if (nrm > 1e-8) return v / nrm;
  }
  throw NumericalDegeneracy("unit_sphere: norm underflow persisted");
}

template <class M, class V>
M reflection_to_impl(const V& x, const V& y) {
  if (x.size() != y.size())
    throw SizeMismatch("reflection_to: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-12 || std::abs(y.norm() - 1.0) > 1e-12)
    throw DomainError("reflection_to: inputs must be unit vectors");
  V w = y - x;
  double wn = w.norm();
  if (wn < 1e-12) throw DegeneratePair("reflection_to: x = y");
  if (x.size() == 1) {
    M r(1, 1);
    r(0, 0) = y[0] / x[0];
    return r;
  }
  V v = w / wn;
  // R = 1 + (c-1) v v* with c = 1 + |w|^2 / <w, x>; |c| = 1 because
  // <w, x> = <y, x> - 1 and |w|^2 = 2 - 2 Re<y, x>.
  auto c = typename M::Scalar(1) + wn * wn / w.dot(x);
  M r = M::Identity(x.size(), x.size());
  r.noalias() += (c - typename M::Scalar(1)) * (v * v.adjoint());
  return r;
}

// Subgroup recursion: a Haar sample in dimension j is (reflection taking e_1
// to a uniform sphere point) times (1 + Haar in dimension j-1).
Mat orthogonal_reflection_product(int n, std::mt19937_64& rng) {
  Mat g(1, 1);
  g(0, 0) = (rng() & 1u) ? 1.0 : -1.0;
  for (int j = 2; j <= n; ++j) {
    Vec e1 = Vec::Zero(j);
    e1[0] = 1.0;
    Vec v;
    do {
      v = unit_sphere<Vec>(j, rng);
    } while ((v - e1).norm() < 1e-10);
    Mat next = Mat::Zero(j, j);
    next(0, 0) = 1.0;
    next.bottomRightCorner(j - 1, j - 1) = g;
    g = reflection_to(e1, v) * next;
  }
  return g;
}

CMat unitary_reflection_product(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  CMat g(1, 1);
  g(0, 0) = std::polar(1.0, phase(rng));
  for (int j = 2; j <= n; ++j) {
    CVec e1 = CVec::Zero(j);
    e1[0] = 1.0;
    CVec v;
    do {
      v = unit_sphere<CVec>(j, rng);
    } while ((v - e1).norm() < 1e-10);
    CMat next = CMat::Zero(j, j);
    next(0, 0) = 1.0;
    next.bottomRightCorner(j - 1, j - 1) = g;
    g = reflection_to(e1, v) * next;
  }
  return g;
}

// Gram-Schmidt over the quaternion right module: coefficients multiply on the
// right, <u, v c> = <u, v> c. Columns of a quaternion Ginibre draw become
// quaternion-orthonormal; the law is invariant under left multiplication by
// any quaternion-unitary matrix, hence Haar.
CMat sp_compact_gram_schmidt(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  for (int tries = 0; tries < kMaxResample; ++tries) {
    std::vector<std::vector<Quat>> col(n, std::vector<Quat>(n));
    for (auto& c : col)
      for (auto& q : c) q = {Cx(nd(rng), nd(rng)), Cx(nd(rng), nd(rng))};
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      for (int i = 0; i < k; ++i) {
        Quat c{Cx(0, 0), Cx(0, 0)};
        for (int m = 0; m < n; ++m) c = c + qconj(col[i][m]) * col[k][m];
        for (int m = 0; m < n; ++m) col[k][m] = col[k][m] - col[i][m] * c;
      }
      double nrm2 = 0.0;
      for (int m = 0; m < n; ++m) nrm2 += qnorm2(col[k][m]);
      if (nrm2 < 1e-12) {
        ok = false;
        break;
      }
      double inv = 1.0 / std::sqrt(nrm2);
      for (int m = 0; m < n; ++m)
        col[k][m] = {col[k][m].a * inv, col[k][m].b * inv};
    }
    if (!ok) continue;
    CMat g(2 * n, 2 * n);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        g(m, k) = col[k][m].a;
        g(m, n + k) = col[k][m].b;
        g(n + m, k) = -std::conj(col[k][m].b);
        g(n + m, n + k) = std::conj(col[k][m].a);
      }
    return g;
  }
  throw NumericalDegeneracy("sp_compact: rank deficiency persisted");
}

Mat orthogonal_qr(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  for (int tries = 0; tries < kMaxResample; ++tries) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Vec d = qr.matrixQR().diagonal();
    if (d.cwiseAbs().minCoeff() == 0.0) continue;
    Mat q = qr.householderQ();
    for (int j = 0; j < n; ++j)
      if (d[j] < 0) q.col(j) *= -1.0;
    return q;
  }
  throw NumericalDegeneracy("orthogonal_qr: rank deficiency persisted");
}

CMat unitary_qr(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  for (int tries = 0; tries < kMaxResample; ++tries) {
    CMat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = Cx(nd(rng), nd(rng));
    Eigen::HouseholderQR<CMat> qr(a);
    CVec d = qr.matrixQR().diagonal();
    if (d.cwiseAbs().minCoeff() == 0.0) continue;
    CMat q = qr.householderQ();
    for (int j = 0; j < n; ++j) q.col(j) *= d[j] / std::abs(d[j]);
    return q;
  }
  throw NumericalDegeneracy("unitary_qr: rank deficiency persisted");
}

void check_kind(const GroupKind& kind) {
  if (kind.n < 1) throw DomainError("sample_haar: rank parameter must be >= 1");
}

}  // namespace

Vec sample_sphere(int n, std::mt19937_64& rng) {
  return unit_sphere<Vec>(n, rng);
}

CVec sample_sphere_complex(int n, std::mt19937_64& rng) {
  return unit_sphere<CVec>(n, rng);
}

Mat reflection_to(const Vec& x, const Vec& y) {
  return reflection_to_impl<Mat>(x, y);
}

CMat reflection_to(const CVec& x, const CVec& y) {
  return reflection_to_impl<CMat>(x, y);
}

Mat sample_orthogonal(int n, bool special, std::mt19937_64& rng) {
  Mat g = orthogonal_reflection_product(n, rng);
  // Right translation by diag(1,...,1,-1) maps Haar on the reflection coset
  // onto Haar on SO(n); the mixture stays Haar.
  if (special && g.determinant() < 0) g.col(n - 1) *= -1.0;
  return g;
}

CMat sample_haar(const GroupKind& kind, std::mt19937_64& rng) {
  check_kind(kind);
  switch (kind.family) {
    case Family::O:
      return sample_orthogonal(kind.n, false, rng).cast<Cx>();
    case Family::SO:
      return sample_orthogonal(kind.n, true, rng).cast<Cx>();
    case Family::U:
      return unitary_reflection_product(kind.n, rng);
    case Family::SpCompact:
      return sp_compact_gram_schmidt(kind.n, rng);
  }
  throw DomainError("sample_haar: unknown family");
}

CMat sample_haar_qr_oracle(const GroupKind& kind, std::mt19937_64& rng) {
  check_kind(kind);
  switch (kind.family) {
    case Family::O:
      return orthogonal_qr(kind.n, rng).cast<Cx>();
    case Family::SO: {
      Mat g = orthogonal_qr(kind.n, rng);
      if (g.determinant() < 0) g.col(kind.n - 1) *= -1.0;
      return g.cast<Cx>();
    }
    case Family::U:
      return unitary_qr(kind.n, rng);
    case Family::SpCompact:
      throw DomainError(
          "sample_haar_qr_oracle: no QR oracle for the quaternionic family");
  }
  throw DomainError("sample_haar_qr_oracle: unknown family");
}

GrassCoord sample_grassmann(int p, int q, std::mt19937_64& rng) {
  if (p < 1 || q < 1) throw DomainError("sample_grassmann: p, q must be >= 1");
  for (int tries = 0; tries < kMaxResample; ++tries) {
    Mat g = sample_orthogonal(p + q, false, rng);
    Mat a = g.topLeftCorner(p, p);
    if (solve_condition(a) >= kCondBound) continue;
    Mat b = g.topRightCorner(p, q);
    return {p, q, a.partialPivLu().solve(b)};
  }
  throw NumericalDegeneracy("sample_grassmann: no graph coordinate found");
}

CMat truncate_unitary(const CMat& g, int n) {
  if (g.rows() != g.cols() || n < 0 || n > g.rows())
    throw SizeMismatch("truncate_unitary: bad corner size");
  const int m = static_cast<int>(g.rows()) - n;
  if (m == 0) return g;
  CMat delta = g.bottomRightCorner(m, m);
  CMat one_plus = CMat::Identity(m, m) + delta;
  if (solve_condition(one_plus) >= kCondBound)
    throw SingularMatrix("truncate_unitary: -1 in the lower corner spectrum");
  return g.topLeftCorner(n, n) -
         g.topRightCorner(n, m) *
             one_plus.partialPivLu().solve(g.bottomLeftCorner(m, n));
}

Cx hua_weight(const CMat& g, double lambda, double mu) {
  if (lambda + mu <= -1.0)
    throw DomainError("hua_weight: lambda + mu must exceed -1");
  Cx s(0.0, 0.0);
  for (double phi : unitary_eigenphases(g)) {
    if (std::abs(phi - M_PI) < 1e-12)
      throw BranchViolation("hua_weight: eigenphase on the cut at pi");
    s += lambda * std::log(Cx(1.0, 0.0) + std::polar(1.0, phi)) +
         mu * std::log(Cx(1.0, 0.0) + std::polar(1.0, -phi));
  }
  return std::exp(s);
}

}  // namespace invmeas
