#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qcone/herm.hpp"

namespace {

using namespace qcone;

TEST(HermMatrix, RejectsNonHermitianInput) {
  CMat a(2, 2);
  a << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
  EXPECT_THROW(HermMatrix{a}, DomainError);
}

TEST(HermMatrix, SymmetrizesWithinTolerance) {
  CMat a(2, 2);
  a << 1.0, Complex(0.5, 1e-13), Complex(0.5, 0.0), 2.0;
  const HermMatrix h(a);
  EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
  EXPECT_EQ(h(0, 0).imag(), 0.0);
}

TEST(HermMatrix, RejectsNonSquare) { EXPECT_THROW(HermMatrix{CMat::Zero(2, 3)}, ShapeError); }

TEST(Hvec, IsAnIsometryAndRoundTrips) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 4; ++n) {
    const CMat a = oracle::random_herm(n, rng);
    const CMat b = oracle::random_herm(n, rng);
    const RVec va = hvec(a);
    ASSERT_EQ(va.size(), n * n);
    EXPECT_NEAR(va.dot(hvec(b)), (a * b).trace().real(), 1e-12);
    EXPECT_LT((hmat(va, n).mat() - a).norm(), 1e-14);
  }
}

TEST(Hvec, OrderIsDiagonalThenUpperTriangleColumnMajor) {
  CMat a = CMat::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  a(2, 2) = 3.0;
  a(0, 1) = Complex(4.0, 5.0);
  a(0, 2) = Complex(6.0, 7.0);
  a(1, 2) = Complex(8.0, 9.0);
  a = CMat(a.triangularView<Eigen::StrictlyUpper>()) +
      CMat(a.triangularView<Eigen::StrictlyUpper>()).adjoint() + CMat(a.diagonal().asDiagonal());
  const RVec v = hvec(a);
  const double r2 = std::sqrt(2.0);
  RVec expect(9);
  expect << 1, 2, 3, 4 * r2, 5 * r2, 6 * r2, 7 * r2, 8 * r2, 9 * r2;
  EXPECT_LT((v - expect).norm(), 1e-13);
}

TEST(HermBasis, IsOrthonormal) {
  const int n = 3;
  for (int i = 0; i < n * n; ++i) {
    for (int j = 0; j < n * n; ++j) {
      const double ip = (herm_basis(n, i) * herm_basis(n, j)).trace().real();
      EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(Spectral, ApplyFnMatchesEigenOracle) {
  std::mt19937_64 rng(2);
  const CMat x = oracle::random_pd(4, rng);
  const HermMatrix lx = apply_fn(spectral(HermMatrix(x)), fn::log());
  EXPECT_LT((lx.mat() - oracle::mat_log(x)).norm(), 1e-12);
  const HermMatrix px = apply_fn(spectral(HermMatrix(x)), fn::power(0.3));
  EXPECT_LT((px.mat() - oracle::mat_pow(x, 0.3)).norm(), 1e-12);
}

TEST(DividedDifferences, MatchScalarFormulasAndTies) {
  const ScalarFn g = fn::log();
  RVec lam(3);
  lam << 0.5, 2.0, 2.0 + 1e-9;
  const RMat d = divided_diff1(lam, g);
  EXPECT_NEAR(d(0, 1), (std::log(2.0) - std::log(0.5)) / 1.5, 1e-14);
  EXPECT_NEAR(d(1, 1), 0.5, 1e-14);
  // Near tie falls back to the derivative.
  EXPECT_NEAR(d(1, 2), 1.0 / (2.0 + 0.5e-9), 1e-8);
  // g[a,b,c] for log: -1/(abc) ... via the recursive definition.
  const double a = 0.5, b = 1.5, c = 4.0;
  const double ab = (std::log(b) - std::log(a)) / (b - a);
  const double bc = (std::log(c) - std::log(b)) / (c - b);
  EXPECT_NEAR(divided_diff2(a, b, c, g), (bc - ab) / (c - a), 1e-13);
  EXPECT_NEAR(divided_diff2(2.0, 2.0, 2.0, g), -0.5 / 4.0, 1e-12);
}

TEST(Frechet, FirstDerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (const ScalarFn& g : {fn::log(), fn::power(0.5), fn::xlogx()}) {
    const CMat x = oracle::random_pd(3, rng);
    const CMat h = oracle::random_herm(3, rng);
    const CMat d = frechet1(spectral(HermMatrix(x)), g, HermMatrix(h)).mat();
    const CMat fd = oracle::diff_mat(
        [&](double t) { return oracle::mat_fn(x + t * h, [&](double v) { return g.f(v); }); },
        1e-4);
    EXPECT_LT((d - fd).norm(), 1e-8 * (1.0 + d.norm())) << g.name;
  }
}

TEST(Frechet, SecondDerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const ScalarFn g = fn::log();
  const CMat x = oracle::random_pd(3, rng);
  const CMat h = oracle::random_herm(3, rng);
  const CMat c = oracle::random_herm(3, rng);
  const CMat d2 = frechet2(spectral(HermMatrix(x)), g, c, h);
  const CMat fd = oracle::diff_mat(
      [&](double t) {
        return frechet1(spectral(HermMatrix::trusted(x + t * h)), g, HermMatrix(c)).mat();
      },
      1e-4);
  EXPECT_LT((d2 - fd).norm(), 1e-7 * (1.0 + d2.norm()));
}

TEST(Kron, PsiPairsTensorWithTrace) {
  std::mt19937_64 rng(5);
  const CMat x = oracle::random_herm(3, rng);
  const CMat y = oracle::random_herm(3, rng);
  const double lhs = psi_apply(kron(HermMatrix(x), conj(HermMatrix(y))));
  EXPECT_NEAR(lhs, (x * y).trace().real(), 1e-12);
  EXPECT_THROW(psi_apply(CMat::Identity(3, 3)), ShapeError);
}

TEST(Logdet, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(6);
  const CMat x = oracle::random_pd(3, rng);
  const CMat h = oracle::random_herm(3, rng);
  const HermMatrix hx(x), hh(h);
  auto f = [&](double t) { return -oracle::logdet(x + t * h); };
  EXPECT_NEAR(logdet_derivs(hx, hh, 0), f(0.0), 1e-12);
  EXPECT_NEAR(logdet_derivs(hx, hh, 1), oracle::diff(f, 1e-4), 1e-7);
  const double d2 = logdet_derivs(hx, hh, 2);
  const double fd2 = oracle::diff([&](double t) {
    return logdet_derivs(HermMatrix::trusted(x + t * h), hh, 1);
  }, 1e-4);
  EXPECT_NEAR(d2, fd2, 1e-6 * (1.0 + d2));
  const double d3 = logdet_derivs(hx, hh, 3);
  const double fd3 = oracle::diff([&](double t) {
    return logdet_derivs(HermMatrix::trusted(x + t * h), hh, 2);
  }, 1e-4);
  EXPECT_NEAR(d3, fd3, 1e-5 * (1.0 + std::abs(d3)));
}

TEST(PdRule, UsesRelativeThreshold) {
  RVec d(2);
  d << 1e6, 1e-7;
  EXPECT_FALSE(is_pd(HermMatrix::diagonal(std::span<const double>(d.data(), 2))));
  d << 1.0, 1e-11;
  EXPECT_TRUE(is_pd(HermMatrix::diagonal(std::span<const double>(d.data(), 2))));
}

TEST(SolveSpd, HandlesBadlyScaledSystems) {
  RMat h(2, 2);
  h << 1e12, 1e5, 1e5, 1.0;
  RMat b(2, 1);
  b << 1.0, 2.0;
  RMat x;
  ASSERT_TRUE(solve_spd(h, b, x));
  EXPECT_LT((h * x - b).norm(), 1e-8);
  RMat bad = -RMat::Identity(2, 2);
  EXPECT_FALSE(solve_spd(bad, b, x));
}

}  // namespace
