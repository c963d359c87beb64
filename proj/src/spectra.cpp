#include "invmeas/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "invmeas/errors.hpp"
#include "invmeas/linalg.hpp"

namespace invmeas {
namespace {

Cx ipow(Cx z, long e) {
  if (e < 0) return Cx(1.0, 0.0) / ipow(z, -e);
  Cx r(1.0, 0.0);
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Symmetric (order-free) unnormalized eigenphase weight of the family.
double weyl_unnormalized(const GroupKind& kind,
                         const std::vector<double>& phi) {
  const int m = static_cast<int>(phi.size());
  double w = 1.0;
  if (kind.family == Family::U) {
    for (int k = 0; k < m; ++k)
      for (int l = k + 1; l < m; ++l)
        w *= 2.0 - 2.0 * std::cos(phi[k] - phi[l]);
    return w;
  }
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l) {
      double d = std::cos(phi[k]) - std::cos(phi[l]);
      w *= d * d;
    }
  const bool odd_orthogonal = kind.family == Family::SO && kind.n % 2 == 1;
  for (int k = 0; k < m; ++k) {
    if (odd_orthogonal) {
      double s = std::sin(0.5 * phi[k]);
      w *= s * s;
    } else if (kind.family == Family::SpCompact) {
      double s = std::sin(phi[k]);
      w *= s * s;
    }
  }
  return w;
}

double domain_top(const GroupKind& kind) {
  return kind.family == Family::U ? 2.0 * M_PI : M_PI;
}

void check_weyl_kind(const GroupKind& kind) {
  if (kind.family == Family::O)
    throw DomainError("weyl: no connected eigenphase density for O");
  if (weyl_rank(kind) < 1)
    throw DomainError("weyl: empty eigenphase parameter list");
}

// Tensor Gauss-Legendre sum of f over [lo, hi]^m.
double tensor_integral(int m, double lo, double hi, int nodes,
                       const std::function<double(const std::vector<double>&)>& f) {
  if (m > 4) throw DomainError("weyl quadrature supported up to rank 4");
  Vec x, w;
  gauss_legendre(nodes, lo, hi, x, w);
  std::vector<int> idx(m, 0);
  std::vector<double> phi(m);
  double total = 0.0;
  while (true) {
    double wt = 1.0;
    for (int a = 0; a < m; ++a) {
      phi[a] = x[idx[a]];
      wt *= w[idx[a]];
    }
    total += wt * f(phi);
    int a = 0;
    for (; a < m; ++a) {
      if (++idx[a] < nodes) break;
      idx[a] = 0;
    }
    if (a == m) break;
  }
  return total;
}

// Full-cube mass of the unnormalized weight; closed form for U, cached
// quadrature for the rest.
double cube_mass(const GroupKind& kind, int nodes) {
  const int m = weyl_rank(kind);
  if (kind.family == Family::U)
    return factorial(m) * std::pow(2.0 * M_PI, m);
  static std::map<std::pair<int, int>, double> cache;
  static std::mutex mu;
  std::pair<int, int> key{static_cast<int>(kind.family), kind.n};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  double z = tensor_integral(m, 0.0, M_PI, nodes, [&](const std::vector<double>& p) {
    return weyl_unnormalized(kind, p);
  });
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = z;
  return z;
}

Cx alternant_ratio(const std::vector<int>& exponents, const CVec& z) {
  const int n = static_cast<int>(z.size());
  CMat num(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) num(i, j) = ipow(z[i], exponents[j]);
  Cx den(1.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) den *= z[i] - z[j];
  return num.partialPivLu().determinant() / den;
}

double min_separation(const CVec& z) {
  double s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < z.size(); ++i)
    for (int j = i + 1; j < z.size(); ++j)
      s = std::min(s, std::abs(z[i] - z[j]));
  return s;
}

Vec paired_average(const Vec& doubled) {
  Vec out(doubled.size() / 2);
  for (int i = 0; i < out.size(); ++i)
    out[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return out;
}

}  // namespace

int weyl_rank(const GroupKind& kind) {
  switch (kind.family) {
    case Family::U:
      return kind.n;
    case Family::SO:
      return kind.n / 2;
    case Family::SpCompact:
      return kind.n;
    case Family::O:
      break;
  }
  throw DomainError("weyl_rank: no eigenphase parameters for O");
}

std::vector<double> weyl_phases(const GroupKind& kind, const CMat& g) {
  std::vector<double> ph = unitary_eigenphases(g);
  if (kind.family == Family::U) return ph;
  check_weyl_kind(kind);
  for (auto& p : ph) p = std::min(p, 2.0 * M_PI - p);
  std::sort(ph.begin(), ph.end());
  if (kind.family == Family::SO && kind.n % 2 == 1)
    ph.erase(ph.begin());  // the fixed eigenvalue 1
  std::vector<double> out(ph.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 * (ph[2 * i] + ph[2 * i + 1]);
  return out;
}

double weyl_density(const GroupKind& kind, const std::vector<double>& phi) {
  check_weyl_kind(kind);
  const int m = weyl_rank(kind);
  if (static_cast<int>(phi.size()) != m)
    throw SizeMismatch("weyl_density: wrong number of phases");
  const double top = domain_top(kind);
  for (int i = 0; i < m; ++i) {
    bool inside = kind.family == Family::U ? (phi[i] >= 0.0 && phi[i] < top)
                                           : (phi[i] >= 0.0 && phi[i] <= top);
    if (!inside) throw DomainError("weyl_density: phase outside domain");
    if (i > 0 && phi[i] < phi[i - 1])
      throw DomainError("weyl_density: phases must be ordered");
  }
  double u = weyl_unnormalized(kind, phi);
  if (kind.family == Family::U) return u * std::pow(2.0 * M_PI, -m);
  return u * factorial(m) / cube_mass(kind, 48);
}

double weyl_expectation(const GroupKind& kind,
                        const std::function<double(const std::vector<double>&)>& f,
                        int nodes_per_axis) {
  check_weyl_kind(kind);
  const int m = weyl_rank(kind);
  double raw =
      tensor_integral(m, 0.0, domain_top(kind), nodes_per_axis,
                      [&](const std::vector<double>& p) {
                        return weyl_unnormalized(kind, p) * f(p);
                      });
  return raw / cube_mass(kind, nodes_per_axis);
}

double weyl_min_phase_tail(const GroupKind& kind, double t,
                           int nodes_per_axis) {
  check_weyl_kind(kind);
  const int m = weyl_rank(kind);
  const double top = domain_top(kind);
  if (t <= 0.0) return 1.0;
  if (t >= top) return 0.0;
  double raw = tensor_integral(m, t, top, nodes_per_axis,
                               [&](const std::vector<double>& p) {
                                 return weyl_unnormalized(kind, p);
                               });
  return raw / cube_mass(kind, nodes_per_axis);
}

double torus_vandermonde_mass(int n, int nodes_per_axis) {
  GroupKind kind{Family::U, n};
  return tensor_integral(n, 0.0, 2.0 * M_PI, nodes_per_axis,
                         [&](const std::vector<double>& p) {
                           return weyl_unnormalized(kind, p);
                         });
}

void gauss_legendre(int k, double a, double b, Vec& nodes, Vec& weights) {
  if (k < 1) throw DomainError("gauss_legendre: order must be >= 1");
  nodes.resize(k);
  weights.resize(k);
  const int half = (k + 1) / 2;
  const double mid = 0.5 * (b + a), span = 0.5 * (b - a);
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (k + 0.5));
    double deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < k; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      deriv = k * (z * p1 - p2) / (z * z - 1.0);
      double step = p1 / deriv;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    nodes[i] = mid - span * z;
    nodes[k - 1 - i] = mid + span * z;
    weights[i] = 2.0 * span / ((1.0 - z * z) * deriv * deriv);
    weights[k - 1 - i] = weights[i];
  }
}

Cx schur(const Partition& alpha, const CVec& z) {
  const int n = static_cast<int>(z.size());
  if (static_cast<int>(alpha.parts.size()) != n)
    throw SizeMismatch("schur: signature length must match point count");
  if (n == 0) throw DomainError("schur: empty point set");
  for (int j = 1; j < n; ++j)
    if (alpha.parts[j] > alpha.parts[j - 1])
      throw DomainError("schur: signature must be weakly decreasing");
  std::vector<int> exponents(n);
  bool negative = false;
  for (int j = 0; j < n; ++j) {
    exponents[j] = alpha.parts[j] + n - 1 - j;
    negative = negative || exponents[j] < 0;
  }
  if (negative)
    for (int i = 0; i < n; ++i)
      if (std::abs(z[i]) < 1e-12)
        throw DomainError("schur: zero point with a negative exponent");

  if (min_separation(z) > 1e-8) return alternant_ratio(exponents, z);

  // Deterministic radial separation, evaluated symmetrically in the step so
  // the leading error is even, then one Richardson stage.
  auto eval = [&](double eps) {
    CVec zp(n), zm(n);
    for (int i = 0; i < n; ++i) {
      Cx dir = std::abs(z[i]) > 1e-8 ? z[i] : Cx(1.0, 0.0);
      zp[i] = z[i] + eps * static_cast<double>(i + 1) * dir;
      zm[i] = z[i] - eps * static_cast<double>(i + 1) * dir;
    }
    if (min_separation(zp) < 1e-9 || min_separation(zm) < 1e-9)
      throw DegeneratePoints("schur: perturbation failed to separate points");
    return 0.5 * (alternant_ratio(exponents, zp) + alternant_ratio(exponents, zm));
  };
  Cx coarse = eval(1e-6);
  Cx fine = eval(5e-7);
  Cx extrapolated = (4.0 * fine - coarse) / 3.0;
  if (!(std::abs(extrapolated - fine) <= 1e-5 * (1.0 + std::abs(extrapolated))))
    throw DegeneratePoints("schur: extrapolation inconsistent at coincidence");
  return extrapolated;
}

std::vector<std::vector<MCEstimateC>> schur_gram_mc(
    const std::vector<Partition>& alphas, int n, std::size_t samples,
    std::mt19937_64& rng) {
  if (samples < 1000) throw TooFewSamples("schur_gram_mc: need >= 1000 samples");
  const std::size_t k = alphas.size();
  std::vector<RunningStats> re(k * k), im(k * k);
  std::vector<Cx> vals(k);
  for (std::size_t s = 0; s < samples; ++s) {
    CMat g = sample_haar({Family::U, n}, rng);
    std::vector<double> ph = unitary_eigenphases(g);
    CVec z(n);
    for (int i = 0; i < n; ++i) z[i] = std::polar(1.0, ph[i]);
    for (std::size_t a = 0; a < k; ++a) vals[a] = schur(alphas[a], z);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        Cx p = vals[a] * std::conj(vals[b]);
        re[a * k + b].add(p.real());
        im[a * k + b].add(p.imag());
      }
  }
  std::vector<std::vector<MCEstimateC>> out(k, std::vector<MCEstimateC>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const auto& r = re[a * k + b];
      const auto& i = im[a * k + b];
      double se = std::hypot(r.std_err(), i.std_err());
      out[a][b] = {Cx(r.mean(), i.mean()), se, samples};
    }
  return out;
}

MCEstimateC schur_inner_mc(const Partition& alpha, const Partition& beta,
                           int n, std::size_t samples, std::mt19937_64& rng) {
  return schur_gram_mc({alpha, beta}, n, samples, rng)[0][1];
}

std::vector<MCEstimateC> matrix_element_orthogonality_mc(int n,
                                                         std::size_t samples,
                                                         std::mt19937_64& rng) {
  if (samples < 1000)
    throw TooFewSamples("matrix_element_orthogonality_mc: need >= 1000");
  const int n4 = n * n * n * n;
  std::vector<RunningStats> re(n4), im(n4);
  for (std::size_t s = 0; s < samples; ++s) {
    CMat g = sample_haar({Family::U, n}, rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            Cx p = g(i, j) * std::conj(g(k, l));
            int at = ((i * n + j) * n + k) * n + l;
            re[at].add(p.real());
            im[at].add(p.imag());
          }
  }
  std::vector<MCEstimateC> out(n4);
  for (int at = 0; at < n4; ++at)
    out[at] = {Cx(re[at].mean(), im[at].mean()),
               std::hypot(re[at].std_err(), im[at].std_err()), samples};
  return out;
}

HermitianSample sample_hermitian_invariant(int d, int n,
                                           std::mt19937_64& rng) {
  if (d != 1 && d != 2 && d != 4)
    throw DomainError("sample_hermitian_invariant: d must be 1, 2 or 4");
  if (n < 1) throw DomainError("sample_hermitian_invariant: n must be >= 1");
  std::normal_distribution<double> nd;
  const double r = 1.0 / std::sqrt(2.0);
  if (d == 1) {
    Mat h(n, n);
    for (int i = 0; i < n; ++i) {
      h(i, i) = nd(rng);
      for (int j = i + 1; j < n; ++j) h(i, j) = h(j, i) = r * nd(rng);
    }
    return {d, n, h.cast<Cx>()};
  }
  if (d == 2) {
    CMat h(n, n);
    for (int i = 0; i < n; ++i) {
      h(i, i) = nd(rng);
      for (int j = i + 1; j < n; ++j) {
        Cx v(r * nd(rng), r * nd(rng));
        h(i, j) = v;
        h(j, i) = std::conj(v);
      }
    }
    return {d, n, h};
  }
  CMat a = CMat::Zero(n, n), b = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = nd(rng);
    for (int j = i + 1; j < n; ++j) {
      Cx va(r * nd(rng), r * nd(rng));
      Cx vb(r * nd(rng), r * nd(rng));
      a(i, j) = va;
      a(j, i) = std::conj(va);
      b(i, j) = vb;
      b(j, i) = -vb;
    }
  }
  CMat h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a;
  h.topRightCorner(n, n) = b;
  h.bottomLeftCorner(n, n) = -b.conjugate();
  h.bottomRightCorner(n, n) = a.conjugate();
  return {d, n, h};
}

Vec hermitian_eigenvalues(const HermitianSample& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(x.h, Eigen::EigenvaluesOnly);
  Vec ev = es.eigenvalues();
  return x.d == 4 ? paired_average(ev) : ev;
}

std::vector<Vec> corner_spectra(const HermitianSample& x) {
  std::vector<Vec> out;
  out.reserve(x.n);
  for (int p = 1; p <= x.n; ++p) {
    if (x.d != 4) {
      CMat sub = x.h.topLeftCorner(p, p);
      Eigen::SelfAdjointEigenSolver<CMat> es(sub, Eigen::EigenvaluesOnly);
      out.push_back(es.eigenvalues());
      continue;
    }
    // Quaternionic corner: the same rows in both halves of the embedding.
    std::vector<int> idx;
    for (int i = 0; i < p; ++i) idx.push_back(i);
    for (int i = 0; i < p; ++i) idx.push_back(x.n + i);
    CMat sub(2 * p, 2 * p);
    for (int i = 0; i < 2 * p; ++i)
      for (int j = 0; j < 2 * p; ++j) sub(i, j) = x.h(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<CMat> es(sub, Eigen::EigenvaluesOnly);
    out.push_back(paired_average(es.eigenvalues()));
  }
  return out;
}

}  // namespace invmeas
