#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qcone/divergence.hpp"

namespace {

using namespace qcone;

TEST(Divergence, RelativeEntropyMatchesOracle) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 4; ++n) {
    const CMat x = oracle::random_pd(n, rng);
    const CMat y = oracle::random_pd(n, rng);
    EXPECT_NEAR(qre(HermMatrix(x), HermMatrix(y)), oracle::qre(x, y), 1e-11);
  }
}

TEST(Divergence, RelativeEntropyVanishesOnEqualArguments) {
  std::mt19937_64 rng(22);
  const HermMatrix x(oracle::random_pd(3, rng));
  EXPECT_NEAR(qre(x, x), 0.0, 1e-13);
}

TEST(Divergence, PetzRenyiMatchesOracle) {
  std::mt19937_64 rng(23);
  const CMat x = oracle::random_pd(3, rng);
  const CMat y = oracle::random_pd(3, rng);
  for (double a : {0.3, 0.5, 1.5, 2.0, -0.5}) {
    EXPECT_NEAR(qalpha(a, HermMatrix(x), HermMatrix(y)), oracle::qalpha(a, x, y), 1e-10) << a;
  }
}

TEST(Divergence, BelavkinStaszewskiMatchesDefinition) {
  std::mt19937_64 rng(24);
  const CMat x = oracle::random_pd(3, rng);
  const CMat y = oracle::random_pd(3, rng);
  const CMat xs = oracle::mat_pow(x, 0.5);
  const double ref = (x * oracle::mat_log(xs * y.inverse() * xs)).trace().real();
  EXPECT_NEAR(dbs(HermMatrix(x), HermMatrix(y)), ref, 1e-10);
  // D_BS dominates D (Hiai-Petz ordering).
  EXPECT_GE(dbs(HermMatrix(x), HermMatrix(y)), qre(HermMatrix(x), HermMatrix(y)) - 1e-12);
}

TEST(Divergence, QhatMatchesPerspectiveTrace) {
  std::mt19937_64 rng(25);
  const CMat x = oracle::random_pd(2, rng);
  const CMat y = oracle::random_pd(2, rng);
  const double a = 0.5;
  const double ref =
      oracle::perspective([a](double v) { return std::pow(v, 1.0 - a); }, x, y).trace().real();
  EXPECT_NEAR(qhat(a, HermMatrix(x), HermMatrix(y)), ref, 1e-11);
}

TEST(Divergence, TracePerspectiveOfLog) {
  RVec d(3);
  d << 0.5, 1.0, 3.0;
  const HermMatrix y = HermMatrix::diagonal(std::span<const double>(d.data(), 3));
  const double x = 2.0;
  double ref = 0.0;
  for (int i = 0; i < 3; ++i) ref += x * std::log(d(i) / x);
  EXPECT_NEAR(trace_persp(catalog("log"), x, y), ref, 1e-13);
}

void check_form(const SplitForm& f, const CMat& x, const CMat& y,
                const std::function<double(const CMat&, const CMat&)>& value) {
  std::mt19937_64 rng(26);
  const int nx = static_cast<int>(x.rows());
  const int ny = static_cast<int>(y.rows());
  const CMat h = oracle::random_herm(nx, rng);
  const CMat v = oracle::random_herm(ny, rng);
  EXPECT_NEAR(f.value(), value(x, y), 1e-10 * (1.0 + std::abs(f.value())));
  const double d1 = f.deriv(h, v, 1);
  const double fd1 = oracle::diff([&](double t) { return value(x + t * h, y + t * v); }, 1e-4);
  EXPECT_NEAR(d1, fd1, 1e-7 * (1.0 + std::abs(d1)));
  const double d2 = f.deriv(h, v, 2);
  const double fd2 = oracle::diff(
      [&](double t) {
        const CMat xt = x + t * h;
        const CMat yt = y + t * v;
        return oracle::diff([&](double u) { return value(xt + u * h, yt + u * v); }, 1e-3);
      },
      1e-3);
  EXPECT_NEAR(d2, fd2, 1e-5 * (1.0 + std::abs(d2)));
}

TEST(SplitForms, RelativeEntropyForm) {
  std::mt19937_64 rng(27);
  const CMat x = oracle::random_pd(3, rng, 0.5);
  const CMat y = oracle::random_pd(3, rng, 0.5);
  check_form(*make_qre_form(x, y), x, y,
             [](const CMat& a, const CMat& b) { return oracle::qre(a, b); });
}

TEST(SplitForms, PetzRenyiForm) {
  std::mt19937_64 rng(28);
  const CMat x = oracle::random_pd(3, rng, 0.5);
  const CMat y = oracle::random_pd(3, rng, 0.5);
  check_form(*make_qalpha_form(0.4, x, y), x, y,
             [](const CMat& a, const CMat& b) { return oracle::qalpha(0.4, a, b); });
  check_form(*make_qalpha_form(1.5, x, y), x, y,
             [](const CMat& a, const CMat& b) { return oracle::qalpha(1.5, a, b); });
}

TEST(SplitForms, TracePerspectiveForm) {
  std::mt19937_64 rng(29);
  const CMat x = CMat::Constant(1, 1, Complex(1.3, 0.0));
  const CMat y = oracle::random_pd(3, rng, 0.5);
  check_form(*make_trace_persp_form(catalog("log"), x, y), x, y, [](const CMat& a, const CMat& b) {
    const double s = a(0, 0).real();
    return s * oracle::mat_log(b / s).trace().real();
  });
}

TEST(SplitForms, QuadratureTraceForm) {
  std::mt19937_64 rng(30);
  const CMat x = oracle::random_pd(2, rng, 0.5);
  const CMat y = oracle::random_pd(2, rng, 0.5);
  check_form(*make_trace_quad_form(catalog("log"), -1.0, x, y), x, y,
             [](const CMat& a, const CMat& b) {
               return -oracle::perspective([](double v) { return std::log(v); }, a, b)
                           .trace()
                           .real();
             });
}

}  // namespace
