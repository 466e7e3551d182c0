#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qcone/problems.hpp"

namespace {

using namespace qcone;

// n = 1 relative entropy cone with x and z fixed to 1 and objective y. The
// centering problem reduces to min_y t y - log(1 + log y) - log y.
ProblemSpec scalar_problem() {
  ProblemSpec p;
  p.cones = {make_cone("epi_qre", 1)};
  p.c = RVec::Zero(3);
  p.c(1) = 1.0;
  p.A = RMat::Zero(2, 3);
  p.A(0, 0) = 1.0;
  p.A(1, 2) = 1.0;
  p.b = RVec::Ones(2);
  return p;
}

double scalar_center(double t) {
  auto d1 = [t](double y) { return t - 1.0 / (y * (1.0 + std::log(y))) - 1.0 / y; };
  double y = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double h = 1e-6 * y;
    const double step = d1(y) / ((d1(y + h) - d1(y - h)) / (2 * h));
    y = std::max(0.5 * y, y - step);
    if (std::abs(step) < 1e-15 * y) break;
  }
  return y;
}

TEST(Newton, CentersScalarProblemAgainstOneDimensionalOracle) {
  const ProblemSpec p = scalar_problem();
  RVec x(3);
  x << 1.0, 1.0, 1.0;
  for (double t : {0.5, 1.0, 4.0}) {
    const CenterResult r = newton_center(p, x, t, 1e-10);
    ASSERT_TRUE(r.ok) << r.message;
    EXPECT_NEAR(r.x(1), scalar_center(t), 1e-10);
    EXPECT_NEAR(r.x(0), 1.0, 1e-14);
    EXPECT_NEAR(r.x(2), 1.0, 1e-14);
  }
}

TEST(Newton, DecrementConvergesQuadratically) {
  const ProblemSpec p = scalar_problem();
  RVec x(3);
  x << 1.0, 1.0, 1.0;
  std::vector<double> dec;
  for (int i = 0; i < 20; ++i) {
    const CenterResult r = newton_step(p, x, 3.0);
    dec.push_back(r.decrement);
    x = r.x;
    if (r.decrement < 1e-12) break;
  }
  bool checked = false;
  for (std::size_t i = 0; i + 1 < dec.size(); ++i) {
    if (dec[i] < 0.25 && dec[i + 1] > 1e-12) {
      EXPECT_LE(dec[i + 1], std::pow(dec[i] / (1.0 - dec[i]), 2) * (1.0 + 1e-6) + 1e-14);
      checked = true;
    }
  }
  EXPECT_TRUE(checked);
}

TEST(Newton, AnalyticCenterOfFixedStateIsIdentity) {
  // With X = I / n and tr Y = 1 the central point is unitarily invariant, so Y = I / n.
  const int n = 3;
  const ProblemSpec p = nearest_state_problem(CMat::Identity(n, n) / double(n));
  const RVec x = concat_points(p, p.start);
  const CenterResult r = newton_center(p, x, 1.0, 1e-10);
  ASSERT_TRUE(r.ok) << r.message;
  const ConePoint c = split_points(p, r.x)[0];
  EXPECT_LT((c.Y.mat() - CMat::Identity(n, n) / double(n)).norm(), 1e-8);
}

TEST(Solve, PinchingMatchesClosedForm) {
  std::mt19937_64 rng(41);
  for (int n : {2, 3}) {
    CMat x0 = oracle::random_pd(n, rng);
    x0 /= x0.trace();
    const SolveResult r = solve(pinching_problem(x0), {.eps = 1e-8});
    ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
    EXPECT_NEAR(r.objective, pinching_optimum(x0), 1e-6);
    EXPECT_LE(r.residual, 1e-8);
    EXPECT_LE(r.gap_bound, 1e-8);
  }
}

TEST(Solve, NearestStateProblemsReachZeroAndOne) {
  std::mt19937_64 rng(42);
  CMat x0 = oracle::random_pd(2, rng);
  x0 /= x0.trace();
  const SolveResult a = solve(nearest_state_problem(x0), {.eps = 1e-8});
  ASSERT_EQ(a.status, SolveStatus::Optimal) << a.message;
  EXPECT_NEAR(a.objective, 0.0, 1e-7);
  const SolveResult b = solve(nearest_state_qalpha_problem(x0), {.eps = 1e-8});
  ASSERT_EQ(b.status, SolveStatus::Optimal) << b.message;
  EXPECT_NEAR(b.objective, -1.0, 1e-7);
  const SolveResult c = solve(dbs_feasibility_problem(x0), {.eps = 1e-8});
  ASSERT_EQ(c.status, SolveStatus::Optimal) << c.message;
  EXPECT_NEAR(c.objective, 0.0, 1e-7);
}

TEST(Solve, CommutingPetzRenyi) {
  RVec x(3), y(3);
  x << 0.2, 0.3, 0.5;
  y << 0.6, 0.1, 0.3;
  const SolveResult r = solve(commuting_qalpha_problem(x, y), {.eps = 1e-8});
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_NEAR(r.objective, -(x.array() * y.array()).sqrt().sum(), 1e-7);
}

TEST(Solve, TracePerspectiveOfLog) {
  RVec d(3);
  d << 1.0, 2.0, 3.0;
  const SolveResult r = solve(trace_persp_log_problem(d), {.eps = 1e-8});
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_NEAR(r.objective, std::log(3.0) + std::log(6.0) + std::log(9.0), 1e-7);
}

TEST(Solve, ShortStepAgreesWithLongStep) {
  CMat x0(2, 2);
  x0 << 0.6, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.4;
  const ProblemSpec p = pinching_problem(x0);
  const SolveResult s = solve(p, {.eps = 1e-6, .mode = SolveMode::ShortStep});
  ASSERT_EQ(s.status, SolveStatus::Optimal) << s.message;
  EXPECT_NEAR(s.objective, pinching_optimum(x0), 1e-5);
  EXPECT_GT(s.outer_iterations, 20);
  for (std::size_t i = 1; i < s.trace.size(); ++i) EXPECT_GT(s.trace[i].t, s.trace[i - 1].t);
  EXPECT_LE(s.trace.back().objective, s.trace.front().objective);
}

TEST(Solve, ReportsInfeasibleStart) {
  CMat x0 = CMat::Identity(2, 2) / 2.0;
  ProblemSpec p = pinching_problem(x0);
  p.start[0] = unit_slack_point(p.cones[0], x0, CMat::Identity(2, 2));
  EXPECT_EQ(solve(p).status, SolveStatus::InfeasibleStart);
  ProblemSpec q = pinching_problem(x0);
  q.start[0].Z = HermMatrix(CMat::Constant(1, 1, Complex(-5.0, 0.0)));
  EXPECT_EQ(solve(q).status, SolveStatus::InfeasibleStart);
}

TEST(Solve, StopsAtIterationLimit) {
  const ProblemSpec p = pinching_problem(CMat::Identity(2, 2) / 2.0);
  SolverOptions o;
  o.max_iter = 2;
  const SolveResult r = solve(p, o);
  EXPECT_EQ(r.status, SolveStatus::IterLimit);
  EXPECT_FALSE(r.message.empty());
}

TEST(Validate, RejectsRankDeficientAndMisshapenData) {
  ProblemSpec p = pinching_problem(CMat::Identity(2, 2) / 2.0);
  ProblemSpec dup = p;
  dup.A.conservativeResize(p.A.rows() + 1, Eigen::NoChange);
  dup.A.row(p.A.rows()) = p.A.row(0);
  dup.b.conservativeResize(p.b.size() + 1);
  dup.b(p.b.size()) = p.b(0);
  EXPECT_THROW(dup.validate(), std::invalid_argument);
  ProblemSpec bad = p;
  bad.c = RVec::Zero(p.dim() + 1);
  EXPECT_THROW(bad.validate(), ShapeError);
}

TEST(Trace, CsvHasHeaderAndOneRowPerRecord) {
  const SolveResult r = solve(pinching_problem(CMat::Identity(2, 2) / 2.0));
  const std::string csv = trace_csv(r);
  EXPECT_EQ(csv.rfind("iter,t,decrement,objective,gap_bound\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.trace.size() + 1);
}

TEST(Modes, ParseAndPrint) {
  EXPECT_EQ(parse_mode("short-step"), SolveMode::ShortStep);
  EXPECT_EQ(parse_mode("long"), SolveMode::LongStep);
  EXPECT_THROW(parse_mode("medium"), std::invalid_argument);
  EXPECT_STREQ(to_string(SolveStatus::IterLimit), "IterLimit");
}

}  // namespace
