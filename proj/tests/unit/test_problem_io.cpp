#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qcone/problem_io.hpp"
#include "qcone/problems.hpp"

namespace {

using namespace qcone;

ProblemFile sample_file() {
  CMat x0(2, 2);
  x0 << 0.7, Complex(0.1, -0.05), Complex(0.1, 0.05), 0.3;
  ProblemFile f;
  f.name = "pinch";
  f.description = "pinching of a qubit state";
  f.problem = pinching_problem(x0);
  f.expected_objective = pinching_optimum(x0);
  SolverOptions o;
  o.eps = 1e-9;
  o.mode = SolveMode::ShortStep;
  f.solver = o;
  return f;
}

TEST(ProblemIo, RoundTripIsExact) {
  const ProblemFile f = sample_file();
  const std::string s = serialize_problem(f);
  const ProblemFile g = parse_problem(s);
  EXPECT_TRUE(same_problem(f, g));
  EXPECT_EQ(serialize_problem(g), s);
  EXPECT_EQ(g.solver, f.solver);
  EXPECT_EQ(*g.expected_objective, *f.expected_objective);
}

TEST(ProblemIo, RoundTripKeepsKrausOperators) {
  ProblemFile f;
  CMat k1(2, 2), k2(2, 2);
  k1 << 1.0, 0.0, 0.0, 0.5;
  k2 << 0.0, Complex(0.0, 0.3), 0.7, 0.0;
  f.problem.cones = {make_cone("op_persp_hypo:log:kraus", 2, {k1, k2})};
  const int d = f.problem.dim();
  f.problem.c = RVec::Zero(d);
  f.problem.A = RMat::Identity(1, d);
  f.problem.b = RVec::Ones(1);
  const ProblemFile g = parse_problem(serialize_problem(f));
  EXPECT_TRUE(same_problem(f, g));
  EXPECT_EQ(g.problem.cones[0].map.kraus.size(), 2u);
}

TEST(ProblemIo, SyntaxErrorsCarryLineAndColumn) {
  try {
    parse_problem("{\n  \"version\": 1,\n  \"cones\": [,]\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3);
    EXPECT_GT(e.column, 1);
  }
}

TEST(ProblemIo, SemanticErrorsCarryPointerAndPosition) {
  std::string s = serialize_problem(sample_file());
  const auto pos = s.find("\"epi_qre\"");
  ASSERT_NE(pos, std::string::npos);
  s.replace(pos, 9, "\"epi_qre_typo\"");
  try {
    parse_problem(s);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pointer, "/cones/0/kind");
    EXPECT_GT(e.line, 1);
    EXPECT_NE(std::string(e.what()).find("epi_qre_typo"), std::string::npos);
  }
}

TEST(ProblemIo, RejectsUnknownKeysAndVersions) {
  EXPECT_THROW(parse_problem(R"({"version": 2, "cones": [], "c": [], "A": [], "b": []})"),
               ParseError);
  std::string s = serialize_problem(sample_file());
  s.insert(1, "\"colour\": 1,");
  EXPECT_THROW(parse_problem(s), ParseError);
}

TEST(ProblemIo, RejectsShapeMismatch) {
  std::string s = serialize_problem(sample_file());
  const auto pos = s.find("\"b\": [");
  ASSERT_NE(pos, std::string::npos);
  s.insert(pos + 6, "0.5, ");
  EXPECT_THROW(parse_problem(s), ParseError);
}

TEST(PointIo, ParsesScalarsAndMatrices) {
  const ConeSpec c = make_cone("epi_qre", 2);
  const ConePoint p =
      parse_point(c, R"({"X": [[[1,0],[0,0]],[[0,0],[2,0]]], "Y": [[1,0.5],[0.5,1]], "Z": 3})");
  EXPECT_EQ(p.X(1, 1), Complex(2.0, 0.0));
  EXPECT_EQ(p.Y(0, 1), Complex(0.5, 0.0));
  EXPECT_EQ(p.Z(0, 0), Complex(3.0, 0.0));
  const ConePoint q = parse_point(c, serialize_point(p));
  EXPECT_EQ(to_vec(c, q), to_vec(c, p));
  EXPECT_THROW(parse_point(c, R"({"X": [[1]], "Y": [[1]], "Z": 1})"), ParseError);
}

TEST(ProblemFiles, ShippedProblemsParseAndSolve) {
  for (const char* name : {"pinch_n2", "pinch_n3", "nearest_state_qalpha", "dbs_feasibility",
                           "tracepersp_log"}) {
    const ProblemFile f = load_problem(std::string(QCONE_PROBLEM_DIR) + "/" + name + ".json");
    ASSERT_TRUE(f.expected_objective.has_value()) << name;
    const SolveResult r = solve(f.problem, f.solver.value_or(SolverOptions{}));
    ASSERT_EQ(r.status, SolveStatus::Optimal) << name << ": " << r.message;
    EXPECT_NEAR(r.objective, *f.expected_objective, 1e-6) << name;
  }
}

}  // namespace
