#pragma once

// Builders for small problems with closed-form optima.

#include "qcone/ipm.hpp"

namespace qcone {

/// Point (X, Y, Z) with Z chosen so that the slack equals the identity.
ConePoint unit_slack_point(const ConeSpec& c, const CMat& x, const CMat& y);

/// min z s.t. (X0, Y, z) in EpiQRE, Y diagonal, tr Y = 1.
/// Optimum tr X0 log X0 - sum_i (X0)_ii log (X0)_ii at Y = diag(X0).
ProblemSpec pinching_problem(const CMat& x0);
double pinching_optimum(const CMat& x0);

/// min z s.t. (X0, Y, z) in EpiQRE, tr Y = 1. Optimum 0 at Y = X0 when tr X0 = 1.
ProblemSpec nearest_state_problem(const CMat& x0);

/// max z s.t. (X0, Y, z) in HypoQalpha(1/2), tr Y = 1. Optimum 1 when tr X0 = 1.
ProblemSpec nearest_state_qalpha_problem(const CMat& x0);

/// min z s.t. (X0, Y, z) in EpiDBS, tr Y = 1. Optimum 0 when tr X0 = 1.
ProblemSpec dbs_feasibility_problem(const CMat& x0);

/// max z s.t. (diag x, diag y, z) in HypoQalpha(1/2) with X and Y fixed.
/// Optimum sum_i sqrt(x_i y_i).
ProblemSpec commuting_qalpha_problem(const RVec& x, const RVec& y);

/// max z s.t. (1, Y, z) in the trace-perspective hypograph of log and
/// tr(diag(d) Y) = 1. Optimum -sum_i log(n d_i).
ProblemSpec trace_persp_log_problem(const RVec& d);

}  // namespace qcone
