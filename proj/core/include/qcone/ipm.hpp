#pragma once

// Primal path-following interior-point method over products of catalog cones
// with linear equality constraints: min <c, x> s.t. A x = b, x in K.

#include <string>
#include <vector>

#include "qcone/barriers.hpp"

namespace qcone {

struct ProblemSpec {
  std::vector<ConeSpec> cones;
  /// Objective over concatenated block coordinates (to_vec order per block).
  RVec c;
  RMat A;
  RVec b;
  /// Optional strictly feasible start, one point per block.
  std::vector<ConePoint> start;

  int dim() const;
  int nu() const;
  /// Throws ShapeError on inconsistent sizes and std::invalid_argument when
  /// A is rank deficient (column-pivoted QR, threshold 1e-10).
  void validate() const;
};

RVec concat_points(const ProblemSpec& p, const std::vector<ConePoint>& pts);
std::vector<ConePoint> split_points(const ProblemSpec& p, const RVec& x);

enum class SolveMode { ShortStep, LongStep };
enum class SolveStatus { Optimal, InfeasibleStart, IterLimit, NumericalFailure };

const char* to_string(SolveMode m);
const char* to_string(SolveStatus s);
SolveMode parse_mode(const std::string& s);

struct SolverOptions {
  double eps = 1e-7;
  SolveMode mode = SolveMode::LongStep;
  double t0 = 1.0;
  double long_step_factor = 10.0;
  /// Short-step update t <- t (1 + gamma / sqrt(nu)).
  double short_step_gamma = 0.5;
  double center_tol = 0.25;
  /// Decrement reached by the final centering before reporting.
  double final_center_tol = 1e-6;
  int max_iter = 500;
  int max_newton = 100;

  bool operator==(const SolverOptions&) const = default;
};

struct TraceRow {
  int iter = 0;
  double t = 0.0;
  double decrement = 0.0;
  double objective = 0.0;
  double gap_bound = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVec x;
  std::vector<ConePoint> points;
  double objective = 0.0;
  double t = 0.0;
  double gap_bound = 0.0;
  int outer_iterations = 0;
  int newton_steps = 0;
  double residual = 0.0;
  std::vector<TraceRow> trace;
  std::string message;
};

struct CenterResult {
  RVec x;
  double decrement = 0.0;
  int steps = 0;
  bool ok = false;
  std::string message;
};

/// One equality-constrained Newton step for t <c, x> + F(x) from a strictly
/// interior x. Damped by 1/(1+delta) while delta > 1/4, then backtracked by
/// halving until interior. Also corrects the residual b - A x.
CenterResult newton_step(const ProblemSpec& p, const RVec& x, double t);

/// Newton iterations until the decrement is at most tol, or until it stalls
/// below 1e-4 at the rounding floor (then ok reflects decrement <= tol).
CenterResult newton_center(const ProblemSpec& p, const RVec& x, double t, double tol,
                           int max_steps = 100);

SolveResult solve(const ProblemSpec& p, const SolverOptions& opt = {});

/// CSV with header iter,t,decrement,objective,gap_bound.
std::string trace_csv(const SolveResult& r);

}  // namespace qcone
