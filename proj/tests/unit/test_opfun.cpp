#include <gtest/gtest.h>

#include <cmath>

#include "qcone/opfun.hpp"

namespace {

using namespace qcone;

// Representation residuals on the validated range, measured against the
// closed-form scalar function.
double grid_residual(const OpConcaveFn& g) {
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = std::pow(10.0, -3.0 + 6.0 * i / 49.0);
    worst = std::max(worst, std::abs(g.represent(x) - g(x)) / std::max(1.0, std::abs(g(x))));
  }
  return worst;
}

class CatalogMeasure : public ::testing::TestWithParam<const char*> {};

TEST_P(CatalogMeasure, RepresentsFunctionOnValidatedRange) {
  const OpConcaveFn g = catalog(GetParam());
  EXPECT_LE(grid_residual(g), kMeasureTol) << GetParam();
  EXPECT_LE(max_measure_residual(g, g.measure), kMeasureTol);
  for (double w : g.measure.weights) EXPECT_GT(w, 0.0);
}

INSTANTIATE_TEST_SUITE_P(All, CatalogMeasure,
                         ::testing::Values("log", "pow:0.5", "pow:0.3", "pow:0.9", "negpow:1.5",
                                           "negpow:1.9", "negpow:-0.5", "one_minus_alpha_pow:0.3",
                                           "one_minus_alpha_pow:1.5", "neg_pow_pair:1.5"));

TEST(Catalog, ValuesAndDerivativesAtOne) {
  const OpConcaveFn lg = catalog("log");
  EXPECT_DOUBLE_EQ(lg.g1, 0.0);
  EXPECT_DOUBLE_EQ(lg.gp1, 1.0);
  const OpConcaveFn p = catalog("pow:0.25");
  EXPECT_DOUBLE_EQ(p(16.0), 2.0);
  EXPECT_DOUBLE_EQ(p.gp1, 0.25);
  const OpConcaveFn q = catalog("negpow:2");
  EXPECT_DOUBLE_EQ(q(3.0), -9.0);
  EXPECT_DOUBLE_EQ(q.gp1, -2.0);
}

TEST(Catalog, MeasureMassMatchesSecondDerivative) {
  // Differentiating the representation twice at x = 1 gives g''(1) = -2 mu([0, 1]).
  EXPECT_NEAR(catalog("log").measure.mass(), 0.5, 1e-12);
  EXPECT_NEAR(catalog("pow:0.5").measure.mass(), 0.125, 1e-8);
}

TEST(Catalog, OneMinusAlphaSwitchesFamily) {
  EXPECT_NEAR(catalog("one_minus_alpha_pow:0.3")(2.0), std::pow(2.0, 0.7), 1e-15);
  EXPECT_NEAR(catalog("one_minus_alpha_pow:1.5")(4.0), -0.5, 1e-15);
  EXPECT_NEAR(catalog("one_minus_alpha_pow:-0.5")(4.0), -8.0, 1e-13);
}

TEST(Catalog, RejectsBadSpecs) {
  EXPECT_THROW(catalog("pow"), std::invalid_argument);
  EXPECT_THROW(catalog("pow:1.5"), std::invalid_argument);
  EXPECT_THROW(catalog("negpow:0.5"), std::invalid_argument);
  EXPECT_THROW(catalog("negpow:2.5"), std::invalid_argument);
  EXPECT_THROW(catalog("sqrtish:0.5"), std::invalid_argument);
  EXPECT_THROW(catalog("pow:abc"), std::invalid_argument);
}

TEST(Transpose, SatisfiesDefinitionAndKeepsRepresentation) {
  for (const char* spec : {"log", "pow:0.3", "negpow:1.5"}) {
    const OpConcaveFn g = catalog(spec);
    const OpConcaveFn t = transpose_fn(g);
    for (double x : {0.01, 0.5, 2.0, 70.0}) {
      EXPECT_NEAR(t(x), x * g(1.0 / x), 1e-12 * std::max(1.0, std::abs(t(x)))) << spec;
      EXPECT_NEAR(t.represent(x), t(x), 1e-8 * std::max(1.0, std::abs(t(x)))) << spec;
    }
  }
}

TEST(DomainCase, ClassifiesLimitBehaviour) {
  EXPECT_EQ(domain_case(catalog("pow:0.5")), DomainCase::I);
  EXPECT_EQ(domain_case(catalog("log")), DomainCase::II);
  EXPECT_EQ(domain_case(catalog("negpow:1.5")), DomainCase::III);
  EXPECT_EQ(domain_case(catalog("negpow:-0.5")), DomainCase::II);
  EXPECT_EQ(domain_case(catalog("neg_pow_pair:1.5")), DomainCase::IV);
  EXPECT_STREQ(to_string(DomainCase::IV), "iv");
  EXPECT_EQ(domain_case(transpose_fn(catalog("negpow:1.5"))), DomainCase::II);
}

TEST(Measure, ConvergesWithNodeCount) {
  const OpConcaveFn g = catalog("pow:0.5");
  const double r30 = max_measure_residual(g, build_measure(g, 30));
  const double r60 = max_measure_residual(g, build_measure(g, 60));
  EXPECT_LT(r60, r30);
  EXPECT_LE(r60, kMeasureTol);
}

}  // namespace
