#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "invmeas/errors.hpp"
#include "invmeas/haar.hpp"
#include "invmeas/linalg.hpp"
#include "invmeas/stats.hpp"

using namespace invmeas;

namespace {

double unitarity_residual(const CMat& g) {
  return (g.adjoint() * g - CMat::Identity(g.rows(), g.cols()))
      .cwiseAbs()
      .maxCoeff();
}

double min_eigenphase(const CMat& g) { return unitary_eigenphases(g)[0]; }

}  // namespace

TEST_CASE("reflection_to: antipodal real pair gives the Householder matrix") {
  auto rng = rng_stream(31, 0);
  Vec x = sample_sphere(4, rng);
  Mat r = reflection_to(x, Vec(-x));
  Mat householder = Mat::Identity(4, 4) - 2.0 * x * x.transpose();
  CHECK((r - householder).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reflection_to: 1x1 complex case is the ratio of phases") {
  CVec x(1), y(1);
  x[0] = std::polar(1.0, 0.3);
  y[0] = std::polar(1.0, 1.9);
  CMat r = reflection_to(x, y);
  CHECK(std::abs(r(0, 0) - y[0] / x[0]) < 1e-15);
}

TEST_CASE("reflection_to: random complex pairs satisfy all postconditions") {
  auto rng = rng_stream(32, 0);
  for (int rep = 0; rep < 50; ++rep) {
    CVec x = sample_sphere_complex(4, rng);
    CVec y = sample_sphere_complex(4, rng);
    CMat r = reflection_to(x, y);
    CHECK(unitarity_residual(r) < 1e-12);
    CHECK((r * x - y).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::JacobiSVD<CMat> svd(r - CMat::Identity(4, 4));
    CHECK(svd.singularValues()[0] > 1e-8);   // rank exactly one
    CHECK(svd.singularValues()[1] < 1e-10);
  }
}

TEST_CASE("reflection_to rejects equal and non-unit inputs") {
  auto rng = rng_stream(33, 0);
  Vec x = sample_sphere(3, rng);
  CHECK_THROWS_AS(reflection_to(x, Vec(x)), DegeneratePair);
  CHECK_THROWS_AS(reflection_to(x, Vec(2.0 * x)), DomainError);
}

TEST_CASE("sample_haar group membership, n = 1..6") {
  auto rng = rng_stream(34, 0);
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      CMat o = sample_haar({Family::O, n}, rng);
      CHECK(unitarity_residual(o) < 1e-10);
      CHECK(o.imag().cwiseAbs().maxCoeff() == 0.0);

      CMat so = sample_haar({Family::SO, n}, rng);
      CHECK(unitarity_residual(so) < 1e-10);
      CHECK(std::abs(so.determinant() - Cx(1.0, 0.0)) < 1e-10);

      CMat u = sample_haar({Family::U, n}, rng);
      CHECK(unitarity_residual(u) < 1e-10);
    }
  }
}

TEST_CASE("sample_haar quaternionic family keeps the block shape exactly") {
  auto rng = rng_stream(35, 0);
  for (int n = 1; n <= 3; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      CMat g = sample_haar({Family::SpCompact, n}, rng);
      REQUIRE(g.rows() == 2 * n);
      CHECK(unitarity_residual(g) < 1e-10);
      CMat phi = g.topLeftCorner(n, n), psi = g.topRightCorner(n, n);
      CHECK((g.bottomLeftCorner(n, n) + psi.conjugate()).cwiseAbs().maxCoeff() ==
            0.0);
      CHECK((g.bottomRightCorner(n, n) - phi.conjugate()).cwiseAbs().maxCoeff() ==
            0.0);
      CHECK(std::abs(g.determinant() - Cx(1.0, 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("rank-one samples: sign frequency and uniform phase") {
  auto rng = rng_stream(36, 0);
  const int n = 100000;
  int plus = 0;
  for (int i = 0; i < n; ++i)
    if (sample_haar({Family::O, 1}, rng)(0, 0).real() > 0) ++plus;
  double se = 0.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(plus / static_cast<double>(n) - 0.5) < 3.0 * se);

  std::vector<double> phases(n);
  for (auto& p : phases)
    p = std::arg(sample_haar({Family::U, 1}, rng)(0, 0));
  auto res = ks_test(phases, [](double x) {
    return (x + M_PI) / (2.0 * M_PI);  // arg is uniform on (-pi, pi]
  });
  CHECK(res.statistic < 0.01);
  CHECK(res.pass);
}

TEST_CASE("first row of an orthogonal sample is uniform on the sphere") {
  auto rng = rng_stream(37, 0);
  const int reps = 20000;
  for (int n : {3, 4}) {
    std::vector<double> c0(reps), clast(reps);
    for (int i = 0; i < reps; ++i) {
      Mat g = sample_orthogonal(n, false, rng);
      c0[i] = g(0, 0);
      clast[i] = g(0, n - 1);
    }
    auto cdf = [n](double t) { return sphere_coordinate_cdf(t, n); };
    CHECK(ks_test(c0, cdf).pass);
    CHECK(ks_test(clast, cdf).pass);
  }
}

TEST_CASE("left translation by a fixed element preserves the law") {
  const int reps = 100000;

  {
    auto hrng = rng_stream(999, 0);
    CMat h = sample_haar({Family::U, 4}, hrng);
    auto rng = rng_stream(38, 0);
    std::vector<double> plain(reps), moved(reps);
    for (int i = 0; i < reps; ++i) {
      CMat g = sample_haar({Family::U, 4}, rng);
      plain[i] = min_eigenphase(g);
      moved[i] = min_eigenphase(h * sample_haar({Family::U, 4}, rng));
    }
    CHECK(ks_two_sample(plain, moved).pass);
  }

  {
    auto hrng = rng_stream(999, 1);
    Mat h = sample_orthogonal(3, false, hrng);
    auto rng = rng_stream(38, 1);
    std::vector<double> plain(reps), moved(reps);
    for (int i = 0; i < reps; ++i) {
      plain[i] = sample_orthogonal(3, false, rng).trace();
      moved[i] = (h * sample_orthogonal(3, false, rng)).trace();
    }
    CHECK(ks_two_sample(plain, moved).pass);
  }
}

TEST_CASE("reflection product and QR oracle sample the same law") {
  const int reps = 100000;

  {
    auto rng = rng_stream(39, 0);
    std::vector<double> a(reps), b(reps);
    for (int i = 0; i < reps; ++i) {
      a[i] = min_eigenphase(sample_haar({Family::U, 2}, rng));
      b[i] = min_eigenphase(sample_haar_qr_oracle({Family::U, 2}, rng));
    }
    CHECK(ks_two_sample(a, b).pass);
  }

  {
    auto rng = rng_stream(39, 1);
    std::vector<double> a(reps), b(reps);
    for (int i = 0; i < reps; ++i) {
      a[i] = sample_haar({Family::O, 3}, rng).real().trace();
      b[i] = sample_haar_qr_oracle({Family::O, 3}, rng).real().trace();
    }
    CHECK(ks_two_sample(a, b).pass);
  }

  {
    auto rng = rng_stream(39, 2);
    std::vector<double> a(reps), b(reps);
    for (int i = 0; i < reps; ++i) {
      a[i] = std::arg(sample_haar({Family::U, 1}, rng)(0, 0));
      b[i] = std::arg(sample_haar_qr_oracle({Family::U, 1}, rng)(0, 0));
    }
    CHECK(ks_two_sample(a, b).pass);
  }

  auto rng = rng_stream(39, 3);
  CHECK_THROWS_AS(sample_haar_qr_oracle({Family::SpCompact, 2}, rng),
                  DomainError);
}

TEST_CASE("graph coordinate of a random line in the plane is standard Cauchy") {
  auto rng = rng_stream(40, 0);
  const int reps = 100000;
  std::vector<double> t(reps);
  for (auto& v : t) v = sample_grassmann(1, 1, rng).t(0, 0);
  CHECK(ks_test(t, [](double x) { return cauchy_cdf(x); }).pass);

  // Sign symmetry of the coordinate law.
  std::vector<double> flipped(reps);
  for (auto& v : flipped) v = -sample_grassmann(1, 1, rng).t(0, 0);
  CHECK(ks_two_sample(t, flipped).pass);
}

TEST_CASE("squared norm law of the (1,2) graph coordinate") {
  auto rng = rng_stream(41, 0);
  const int reps = 100000;
  std::vector<double> s(reps);
  for (auto& v : s) {
    GrassCoord g = sample_grassmann(1, 2, rng);
    v = g.t.squaredNorm();
  }
  // P(|T|^2 <= s) = P(x1^2 >= 1/(1+s)) for a uniform sphere point in R^3,
  // whose first coordinate is uniform on [-1, 1].
  CHECK(ks_test(s, [](double x) {
          return x <= 0 ? 0.0 : 1.0 - 1.0 / std::sqrt(1.0 + x);
        }).pass);
}

TEST_CASE("corner compression: trivial shapes") {
  auto rng = rng_stream(42, 0);
  CMat g = sample_haar({Family::U, 3}, rng);
  CHECK((truncate_unitary(g, 3) - g).cwiseAbs().maxCoeff() == 0.0);

  CMat u = sample_haar({Family::U, 2}, rng);
  CMat v = sample_haar({Family::U, 2}, rng);
  CMat bd = CMat::Zero(4, 4);
  bd.topLeftCorner(2, 2) = u;
  bd.bottomRightCorner(2, 2) = v;
  CHECK((truncate_unitary(bd, 2) - u).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("corner compression lands in the unitary group and matches the "
          "Cayley corner") {
  auto rng = rng_stream(43, 0);
  for (int rep = 0; rep < 20; ++rep) {
    CMat g = sample_haar({Family::U, 5}, rng);
    CMat y = truncate_unitary(g, 2);
    CHECK(unitarity_residual(y) < 1e-9);
    CMat corner = cayley(g).topLeftCorner(2, 2);
    CHECK((corner - cayley(y)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("corner compression is equivariant under the corner group") {
  auto rng = rng_stream(44, 0);
  for (int rep = 0; rep < 10; ++rep) {
    CMat g = sample_haar({Family::U, 5}, rng);
    CMat h1 = sample_haar({Family::U, 2}, rng);
    CMat h2 = sample_haar({Family::U, 2}, rng);
    CMat h1e = CMat::Identity(5, 5), h2e = CMat::Identity(5, 5);
    h1e.topLeftCorner(2, 2) = h1;
    h2e.topLeftCorner(2, 2) = h2;
    CMat lhs = truncate_unitary(h1e * g * h2e, 2);
    CMat rhs = h1 * truncate_unitary(g, 2) * h2;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("corner compression rejects -1 in the lower corner") {
  auto rng = rng_stream(45, 0);
  CMat g = CMat::Zero(3, 3);
  g.topLeftCorner(2, 2) = sample_haar({Family::U, 2}, rng);
  g(2, 2) = Cx(-1.0, 0.0);
  CHECK_THROWS_AS(truncate_unitary(g, 2), SingularMatrix);
}

TEST_CASE("corner compression pushes Haar forward to Haar") {
  auto rng = rng_stream(46, 0);
  const int reps = 30000;
  std::vector<double> trunc(reps), direct(reps);
  for (int i = 0; i < reps; ++i) {
    trunc[i] = min_eigenphase(truncate_unitary(sample_haar({Family::U, 3}, rng), 2));
    direct[i] = min_eigenphase(sample_haar({Family::U, 2}, rng));
  }
  CHECK(ks_two_sample(trunc, direct).pass);
}

TEST_CASE("spectral weight: trivial exponents and branch guard") {
  auto rng = rng_stream(47, 0);
  CMat g = sample_haar({Family::U, 3}, rng);
  CHECK(std::abs(hua_weight(g, 0.0, 0.0) - Cx(1.0, 0.0)) < 1e-14);

  CMat minus = CMat::Identity(1, 1) * Cx(-1.0, 0.0);
  CHECK_THROWS_AS(hua_weight(minus, 1.0, 1.0), BranchViolation);
  CHECK_THROWS_AS(hua_weight(g, -0.6, -0.4), DomainError);
}

TEST_CASE("spectral weight averages to the gamma-factorial product") {
  // E over the rank-one unitary group: integral of |1+e^{it}|^2 = 2.
  {
    auto rng = rng_stream(48, 0);
    auto est = mc_mean(
        [&] {
          return hua_weight(sample_haar({Family::U, 1}, rng), 1.0, 1.0).real();
        },
        100000);
    CHECK(std::abs(est.mean - 2.0) < 3.0 * est.std_err);
  }
  // Rank two: 2 * Gamma(2)Gamma(4)/Gamma(3)^2 = 3.
  {
    auto rng = rng_stream(48, 1);
    auto est = mc_mean(
        [&] {
          Cx w = hua_weight(sample_haar({Family::U, 2}, rng), 1.0, 1.0);
          CHECK(std::abs(w.imag()) < 1e-10);
          return w.real();
        },
        100000);
    CHECK(std::abs(est.mean - 3.0) < 3.0 * est.std_err);
  }
}

TEST_CASE("identical seed and stream reproduce the sample") {
  auto r1 = rng_stream(49, 7);
  auto r2 = rng_stream(49, 7);
  CMat a = sample_haar({Family::U, 3}, r1);
  CMat b = sample_haar({Family::U, 3}, r2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CMat c = sample_haar({Family::U, 3}, r1);
  CHECK((a - c).cwiseAbs().maxCoeff() > 1e-3);  // stream advanced
}
