#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "invmeas/errors.hpp"
#include "invmeas/haar.hpp"
#include "invmeas/linalg.hpp"
#include "invmeas/spectra.hpp"
#include "invmeas/stats.hpp"

using namespace invmeas;

namespace {

// Independent small-degree oracle: sum over semistandard tableaux of shape
// lambda (nonnegative parts) with entries in 1..n of the monomial they carry.
Cx ssyt_schur(const std::vector<int>& lambda, const CVec& z) {
  const int n = static_cast<int>(z.size());
  std::vector<int> shape;
  for (int part : lambda)
    if (part > 0) shape.push_back(part);
  if (shape.empty()) return Cx(1.0, 0.0);
  std::vector<std::vector<int>> t(shape.size());
  for (std::size_t r = 0; r < shape.size(); ++r) t[r].assign(shape[r], 0);
  Cx total(0.0, 0.0);
  std::function<void(std::size_t, int, Cx)> fill = [&](std::size_t r, int c,
                                                       Cx monomial) {
    if (r == t.size()) {
      total += monomial;
      return;
    }
    std::size_t nr = r;
    int nc = c + 1;
    if (nc >= shape[r]) {
      nr = r + 1;
      nc = 0;
    }
    int lo = 1;
    if (c > 0) lo = std::max(lo, t[r][c - 1]);               // rows weakly increase
    if (r > 0 && c < shape[r - 1]) lo = std::max(lo, t[r - 1][c] + 1);  // columns strictly
    for (int v = lo; v <= n; ++v) {
      t[r][c] = v;
      fill(nr, nc, monomial * z[v - 1]);
    }
  };
  fill(0, 0, Cx(1.0, 0.0));
  return total;
}

CVec random_points(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVec z(n);
  for (int i = 0; i < n; ++i) z[i] = Cx(nd(rng), nd(rng)) + Cx(2.0, 0.0);
  return z;
}

CVec unit_eigenvalues(const CMat& g) {
  auto ph = unitary_eigenphases(g);
  CVec z(ph.size());
  for (std::size_t i = 0; i < ph.size(); ++i) z[i] = std::polar(1.0, ph[i]);
  return z;
}

}  // namespace

TEST_CASE("gauss_legendre integrates low-degree polynomials exactly") {
  Vec x, w;
  gauss_legendre(2, 0.0, 1.0, x, w);
  double cubic = 0.0;
  for (int i = 0; i < 2; ++i) cubic += w[i] * x[i] * x[i] * x[i];
  CHECK(cubic == doctest::Approx(0.25).epsilon(1e-13));

  gauss_legendre(20, -1.0, 1.0, x, w);
  double c = 0.0;
  for (int i = 0; i < 20; ++i) c += w[i] * std::cos(x[i]);
  CHECK(c == doctest::Approx(2.0 * std::sin(1.0)).epsilon(1e-13));
}

TEST_CASE("eigenphase density closed values") {
  CHECK(weyl_density({Family::U, 1}, {1.0}) ==
        doctest::Approx(1.0 / (2.0 * M_PI)));
  CHECK(weyl_density({Family::U, 2}, {0.0, M_PI}) ==
        doctest::Approx(1.0 / (M_PI * M_PI)));
  // Rank-one families against hand-normalized weights.
  CHECK(weyl_density({Family::SO, 2}, {0.7}) == doctest::Approx(1.0 / M_PI));
  CHECK(weyl_density({Family::SO, 3}, {M_PI}) ==
        doctest::Approx(2.0 / M_PI).epsilon(1e-9));
  CHECK(weyl_density({Family::SpCompact, 1}, {M_PI / 2}) ==
        doctest::Approx(2.0 / M_PI).epsilon(1e-9));
}

TEST_CASE("eigenphase density rejects bad arguments") {
  CHECK_THROWS_AS(weyl_density({Family::U, 2}, {1.0, 7.0}), DomainError);
  CHECK_THROWS_AS(weyl_density({Family::U, 2}, {2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(weyl_density({Family::SO, 4}, {0.5, 3.5}), DomainError);
  CHECK_THROWS_AS(weyl_density({Family::O, 2}, {1.0}), DomainError);
  CHECK_THROWS_AS(weyl_density({Family::U, 2}, {1.0}), SizeMismatch);
}

TEST_CASE("density mass over the ordered simplex is one") {
  for (GroupKind kind : {GroupKind{Family::U, 2}, GroupKind{Family::U, 3},
                         GroupKind{Family::SO, 4}, GroupKind{Family::SO, 5},
                         GroupKind{Family::SpCompact, 2}}) {
    const int m = weyl_rank(kind);
    const double top = kind.family == Family::U ? 2.0 * M_PI : M_PI;
    Vec x, w;
    gauss_legendre(48, 0.0, top * (kind.family == Family::U ? 1.0 - 1e-12 : 1.0),
                   x, w);
    // Integrate the ordered density over the full cube by sorting each node;
    // the answer is m! times the simplex mass.
    double total = 0.0;
    std::vector<int> idx(m, 0);
    while (true) {
      std::vector<double> phi(m);
      double wt = 1.0;
      for (int a = 0; a < m; ++a) {
        phi[a] = x[idx[a]];
        wt *= w[idx[a]];
      }
      std::sort(phi.begin(), phi.end());
      total += wt * weyl_density(kind, phi);
      int a = 0;
      for (; a < m; ++a) {
        if (++idx[a] < 48) break;
        idx[a] = 0;
      }
      if (a == m) break;
    }
    double fact = 1.0;
    for (int k = 2; k <= m; ++k) fact *= k;
    CHECK(std::abs(total - fact) < 1e-3 * fact);
  }
}

TEST_CASE("torus mass of the squared Vandermonde is n! (2pi)^n") {
  for (int n : {2, 3}) {
    double fact = n == 2 ? 2.0 : 6.0;
    double expected = fact * std::pow(2.0 * M_PI, n);
    CHECK(std::abs(torus_vandermonde_mass(n) - expected) < 1e-3 * expected);
  }
}

TEST_CASE("weyl_phases folds families into their fundamental domain") {
  CMat u = CMat::Zero(2, 2);
  u(0, 0) = std::polar(1.0, 2.5);
  u(1, 1) = std::polar(1.0, 0.3);
  auto up = weyl_phases({Family::U, 2}, u);
  CHECK(up[0] == doctest::Approx(0.3));
  CHECK(up[1] == doctest::Approx(2.5));

  double th = 1.1;
  Mat r3 = Mat::Identity(3, 3);
  r3(0, 0) = std::cos(th);
  r3(0, 1) = -std::sin(th);
  r3(1, 0) = std::sin(th);
  r3(1, 1) = std::cos(th);
  auto p3 = weyl_phases({Family::SO, 3}, r3.cast<Cx>());
  REQUIRE(p3.size() == 1);
  CHECK(p3[0] == doctest::Approx(th));

  auto rng = rng_stream(52, 0);
  CMat sp = sample_haar({Family::SpCompact, 2}, rng);
  auto psp = weyl_phases({Family::SpCompact, 2}, sp);
  REQUIRE(psp.size() == 2);
  CHECK(psp[0] <= psp[1]);
  CHECK(psp[0] >= 0.0);
  CHECK(psp[1] <= M_PI);
}

TEST_CASE("power sums: Monte Carlo matches quadrature for every family") {
  auto rng = rng_stream(53, 0);
  const std::size_t reps = 20000;
  std::vector<GroupKind> kinds = {GroupKind{Family::U, 2}, GroupKind{Family::U, 3},
                                  GroupKind{Family::SO, 4}, GroupKind{Family::SO, 5},
                                  GroupKind{Family::SpCompact, 2}};
  for (const auto& kind : kinds) {
    for (int k = 1; k <= 3; ++k) {
      auto pk = [k](const std::vector<double>& phi) {
        double s = 0.0;
        for (double p : phi) s += std::pow(p, k);
        return s;
      };
      double quad = weyl_expectation(kind, pk);
      RunningStats acc;
      for (std::size_t i = 0; i < reps; ++i) {
        CMat g = sample_haar(kind, rng);
        acc.add(pk(weyl_phases(kind, g)));
      }
      INFO("family ", static_cast<int>(kind.family), " n=", kind.n, " k=", k);
      CHECK(std::abs(acc.mean() - quad) < 3.0 * acc.std_err() + 1e-8);
    }
  }
}

TEST_CASE("smallest eigenphase of SO(4) follows the quadrature tail") {
  auto rng = rng_stream(54, 0);
  GroupKind kind{Family::SO, 4};
  const int reps = 20000, bins = 12;
  std::vector<double> counts(bins, 0.0), expected(bins, 0.0);
  for (int i = 0; i < reps; ++i) {
    double m = weyl_phases(kind, sample_haar(kind, rng))[0];
    int b = std::min(bins - 1, static_cast<int>(m / M_PI * bins));
    counts[b] += 1.0;
  }
  for (int b = 0; b < bins; ++b) {
    double lo = M_PI * b / bins, hi = M_PI * (b + 1) / bins;
    expected[b] =
        reps * (weyl_min_phase_tail(kind, lo) - weyl_min_phase_tail(kind, hi));
  }
  CHECK(chi2_test(counts, expected).pass);
  CHECK(weyl_min_phase_tail(kind, 0.0) == doctest::Approx(1.0));
  CHECK(weyl_min_phase_tail(kind, M_PI) == doctest::Approx(0.0));
}

TEST_CASE("schur closed examples") {
  auto rng = rng_stream(55, 0);
  CVec z = random_points(3, rng);
  CHECK(std::abs(schur({{0, 0, 0}}, z) - Cx(1.0, 0.0)) < 1e-12);

  CVec z2 = random_points(2, rng);
  CHECK(std::abs(schur({{1, 1}}, z2) - z2[0] * z2[1]) < 1e-10);

  CVec ones(2);
  ones << Cx(1.0, 0.0), Cx(1.0, 0.0);
  CHECK(std::abs(schur({{2, 0}}, ones) - Cx(3.0, 0.0)) < 1e-6);
}

TEST_CASE("schur is symmetric and satisfies the shift identity") {
  auto rng = rng_stream(56, 0);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + static_cast<int>(rng() % 2);
    CVec z = random_points(n, rng);
    Partition alpha;
    alpha.parts.assign(n, 0);
    for (int j = 0; j < n; ++j)
      alpha.parts[j] = static_cast<int>(rng() % 4) - 1;
    std::sort(alpha.parts.rbegin(), alpha.parts.rend());
    Cx base = schur(alpha, z);

    CVec zp = z;
    std::shuffle(zp.data(), zp.data() + n, rng);
    CHECK(std::abs(schur(alpha, zp) - base) < 1e-9 * (1.0 + std::abs(base)));

    Partition shifted = alpha;
    for (auto& a : shifted.parts) ++a;
    Cx prod(1.0, 0.0);
    for (int j = 0; j < n; ++j) prod *= z[j];
    CHECK(std::abs(schur(shifted, z) - prod * base) <
          1e-9 * (1.0 + std::abs(prod * base)));
  }
}

TEST_CASE("schur agrees with the tableau oracle at small degree") {
  auto rng = rng_stream(57, 0);
  std::vector<std::vector<int>> shapes2 = {{1, 0}, {1, 1}, {2, 0},
                                           {2, 1}, {2, 2}, {3, 1}};
  std::vector<std::vector<int>> shapes3 = {{1, 0, 0}, {1, 1, 0}, {2, 1, 0},
                                           {1, 1, 1}, {2, 2, 1}, {3, 2, 1}};
  for (int rep = 0; rep < 5; ++rep) {
    CVec z2 = random_points(2, rng);
    for (const auto& s : shapes2) {
      Cx a = schur({s}, z2), b = ssyt_schur(s, z2);
      CHECK(std::abs(a - b) < 1e-9 * (1.0 + std::abs(b)));
    }
    CVec z3 = random_points(3, rng);
    for (const auto& s : shapes3) {
      Cx a = schur({s}, z3), b = ssyt_schur(s, z3);
      CHECK(std::abs(a - b) < 1e-9 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("schur input validation") {
  CVec z = CVec::Ones(2);
  CHECK_THROWS_AS(schur({{0, 1}}, z), DomainError);
  CHECK_THROWS_AS(schur({{1, 0, 0}}, z), SizeMismatch);
  CVec withzero(2);
  withzero << Cx(0.0, 0.0), Cx(1.0, 0.0);
  CHECK_THROWS_AS(schur({{0, -1}}, withzero), DomainError);
}

TEST_CASE("schur functions are orthonormal under the eigenvalue law") {
  auto rng = rng_stream(58, 0);
  std::vector<Partition> alphas = {
      {{0, 0}}, {{1, 0}}, {{1, 1}}, {{2, 1}}, {{0, -1}}};
  auto gram = schur_gram_mc(alphas, 2, 20000, rng);
  for (std::size_t a = 0; a < alphas.size(); ++a)
    for (std::size_t b = 0; b < alphas.size(); ++b) {
      double target = a == b ? 1.0 : 0.0;
      CHECK(std::abs(gram[a][b].mean - Cx(target, 0.0)) <
            3.0 * gram[a][b].std_err + 1e-9);
    }

  auto one = schur_inner_mc({{0, 0}}, {{0, 0}}, 2, 1000, rng);
  CHECK(std::abs(one.mean - Cx(1.0, 0.0)) < 1e-12);
  CHECK_THROWS_AS(schur_inner_mc({{0, 0}}, {{0, 0}}, 2, 999, rng),
                  TooFewSamples);
}

TEST_CASE("matrix element orthogonality table") {
  auto rng = rng_stream(59, 0);
  auto t1 = matrix_element_orthogonality_mc(1, 2000, rng);
  CHECK(std::abs(t1[0].mean - Cx(1.0, 0.0)) < 1e-12);

  const int n = 3;
  auto t = matrix_element_orthogonality_mc(n, 20000, rng);
  auto at = [n](int i, int j, int k, int l) {
    return ((i * n + j) * n + k) * n + l;
  };
  auto e1 = t[at(0, 0, 1, 1)];
  CHECK(std::abs(e1.mean) < 3.0 * e1.std_err + 1e-9);
  auto e2 = t[at(0, 1, 0, 1)];
  CHECK(std::abs(e2.mean - Cx(1.0 / 3.0, 0.0)) < 3.0 * e2.std_err + 1e-9);
  CHECK_THROWS_AS(matrix_element_orthogonality_mc(2, 10, rng), TooFewSamples);
}

TEST_CASE("invariant ensembles: shape and the n = 1 law") {
  auto rng = rng_stream(60, 0);
  for (int d : {1, 2, 4}) {
    HermitianSample x = sample_hermitian_invariant(d, 3, rng);
    CHECK((x.h - x.h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    if (d == 4) {
      REQUIRE(x.h.rows() == 6);
      CMat phi = x.h.topLeftCorner(3, 3), psi = x.h.topRightCorner(3, 3);
      CHECK((x.h.bottomLeftCorner(3, 3) + psi.conjugate())
                .cwiseAbs()
                .maxCoeff() == 0.0);
      CHECK((x.h.bottomRightCorner(3, 3) - phi.conjugate())
                .cwiseAbs()
                .maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<CMat> es(x.h, Eigen::EigenvaluesOnly);
      Vec ev = es.eigenvalues();
      for (int i = 0; i < 3; ++i)
        CHECK(std::abs(ev[2 * i] - ev[2 * i + 1]) < 1e-10);
    }
  }
  const int reps = 20000;
  std::vector<double> lam(reps);
  for (auto& v : lam)
    v = hermitian_eigenvalues(sample_hermitian_invariant(1, 1, rng))[0];
  CHECK(ks_test(lam, [](double t) { return normal_cdf(t); }).pass);
  CHECK_THROWS_AS(sample_hermitian_invariant(3, 2, rng), DomainError);
}

TEST_CASE("level repulsion: spacing density near zero has slope two") {
  auto rng = rng_stream(61, 0);
  const int reps = 1000000, bins = 8;
  const double lo = 0.05, hi = 0.45, width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  for (int i = 0; i < reps; ++i) {
    Vec ev = hermitian_eigenvalues(sample_hermitian_invariant(2, 2, rng));
    double s = ev[1] - ev[0];
    if (s >= lo && s < hi) counts[static_cast<int>((s - lo) / width)] += 1.0;
  }
  std::vector<double> xs, ys;
  for (int b = 0; b < bins; ++b) {
    REQUIRE(counts[b] > 0);
    xs.push_back(std::log(lo + (b + 0.5) * width));
    ys.push_back(std::log(counts[b]));
  }
  double mx = 0.0, my = 0.0;
  for (int b = 0; b < bins; ++b) {
    mx += xs[b] / bins;
    my += ys[b] / bins;
  }
  double num = 0.0, den = 0.0;
  for (int b = 0; b < bins; ++b) {
    num += (xs[b] - mx) * (ys[b] - my);
    den += (xs[b] - mx) * (xs[b] - mx);
  }
  CHECK(std::abs(num / den - 2.0) < 0.1);
}

TEST_CASE("conjugating the ensemble leaves spectra invariant") {
  auto rng = rng_stream(62, 0);
  auto urng = rng_stream(62, 1);
  CMat u = sample_haar({Family::U, 3}, urng);
  const int reps = 10000;
  std::vector<double> plain(reps), conj(reps);
  for (int i = 0; i < reps; ++i) {
    plain[i] = hermitian_eigenvalues(sample_hermitian_invariant(2, 3, rng))[2];
    HermitianSample x = sample_hermitian_invariant(2, 3, rng);
    HermitianSample moved{2, 3, u * x.h * u.adjoint()};
    conj[i] = hermitian_eigenvalues(moved)[2];
  }
  CHECK(ks_two_sample(plain, conj).pass);
}

TEST_CASE("corner spectra of a diagonal matrix and interlacing everywhere") {
  HermitianSample diag{2, 3, CMat::Zero(3, 3)};
  diag.h(0, 0) = 1.0;
  diag.h(1, 1) = 2.0;
  diag.h(2, 2) = 3.0;
  auto levels = corner_spectra(diag);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0][0] == doctest::Approx(1.0));
  CHECK(levels[1][1] == doctest::Approx(2.0));
  CHECK(levels[2][2] == doctest::Approx(3.0));

  auto rng = rng_stream(63, 0);
  for (int d : {1, 2, 4}) {
    for (int n = 2; n <= 4; ++n) {
      for (int rep = 0; rep < 1000; ++rep) {
        auto lv = corner_spectra(sample_hermitian_invariant(d, n, rng));
        for (int p = 0; p + 1 < n; ++p)
          for (int j = 0; j <= p; ++j) {
            CHECK(lv[p + 1][j] <= lv[p][j] + 1e-9);
            CHECK(lv[p][j] <= lv[p + 1][j + 1] + 1e-9);
          }
      }
    }
  }
}

TEST_CASE("corner of the rank-two complex ensemble is conditionally uniform") {
  auto rng = rng_stream(64, 0);
  const int reps = 20000;
  std::vector<double> u(reps);
  for (auto& v : u) {
    auto lv = corner_spectra(sample_hermitian_invariant(2, 2, rng));
    v = (lv[0][0] - lv[1][0]) / (lv[1][1] - lv[1][0]);
  }
  CHECK(ks_test(u, [](double t) {
          return std::clamp(t, 0.0, 1.0);
        }).pass);
}

TEST_CASE("eigenphases reconstruct the characteristic polynomial") {
  auto rng = rng_stream(65, 0);
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      CMat g = sample_haar({Family::U, n}, rng);
      CVec z = unit_eigenvalues(g);
      for (int t = 0; t <= n; ++t) {
        Cx pt = 2.0 * std::polar(1.0, 2.0 * M_PI * t / (n + 1));
        Cx direct = (pt * CMat::Identity(n, n) - g).partialPivLu().determinant();
        Cx from_phases(1.0, 0.0);
        for (int j = 0; j < n; ++j) from_phases *= pt - z[j];
        CHECK(std::abs(direct - from_phases) < 1e-7 * (1.0 + std::abs(direct)));
      }
    }
  }
}
