#include "qcone/problems.hpp"

#include <cmath>

namespace qcone {

namespace {

// Appends rows fixing the listed coordinates of x to the given values.
void fix_coords(std::vector<RVec>& rows, std::vector<double>& rhs, int dim, int first,
                const RVec& values) {
  for (int i = 0; i < values.size(); ++i) {
    RVec r = RVec::Zero(dim);
    r(first + i) = 1.0;
    rows.push_back(r);
    rhs.push_back(values(i));
  }
}

void trace_row(std::vector<RVec>& rows, std::vector<double>& rhs, int dim, int first,
               const RVec& weights, double value) {
  RVec r = RVec::Zero(dim);
  r.segment(first, weights.size()) = weights;
  rows.push_back(r);
  rhs.push_back(value);
}

void set_constraints(ProblemSpec& p, const std::vector<RVec>& rows, const std::vector<double>& rhs) {
  p.A.resize(static_cast<int>(rows.size()), p.dim());
  p.b.resize(static_cast<int>(rhs.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    p.A.row(static_cast<int>(i)) = rows[i].transpose();
    p.b(static_cast<int>(i)) = rhs[i];
  }
}

// Single block over (X, Y, z) with X fixed to x0 and tr Y = 1.
ProblemSpec state_problem(const std::string& kind, const CMat& x0, double objective_sign) {
  const int n = static_cast<int>(x0.rows());
  ProblemSpec p;
  p.cones.push_back(make_cone(kind, n));
  const ConeSpec& c = p.cones[0];
  const int d = c.dim();
  p.c = RVec::Zero(d);
  p.c(d - 1) = objective_sign;
  std::vector<RVec> rows;
  std::vector<double> rhs;
  fix_coords(rows, rhs, d, 0, hvec(x0));
  RVec w = RVec::Zero(n * n);
  w.head(n).setOnes();
  trace_row(rows, rhs, d, n * n, w, 1.0);
  set_constraints(p, rows, rhs);
  p.start = {unit_slack_point(c, x0, CMat::Identity(n, n) / static_cast<double>(n))};
  return p;
}

}  // namespace

ConePoint unit_slack_point(const ConeSpec& c, const CMat& x, const CMat& y) {
  const CMat h = h_exact(c, x, y);
  const CMat z = c.sigma() * (h - CMat::Identity(c.z_dim(), c.z_dim()));
  return {HermMatrix(x), HermMatrix(y), HermMatrix::trusted(z)};
}

ProblemSpec pinching_problem(const CMat& x0) {
  const int n = static_cast<int>(x0.rows());
  ProblemSpec p = state_problem("epi_qre", x0, 1.0);
  const int d = p.dim();
  std::vector<RVec> rows;
  std::vector<double> rhs;
  for (int i = 0; i < p.A.rows(); ++i) {
    rows.push_back(p.A.row(i).transpose());
    rhs.push_back(p.b(i));
  }
  fix_coords(rows, rhs, d, n * n + n, RVec::Zero(n * n - n));
  set_constraints(p, rows, rhs);
  return p;
}

double pinching_optimum(const CMat& x0) {
  const SpectralDecomp s = spectral_trusted(x0);
  double v = 0.0;
  for (int i = 0; i < s.dim(); ++i) v += s.eigenvalues(i) * std::log(s.eigenvalues(i));
  for (int i = 0; i < x0.rows(); ++i) {
    const double a = x0(i, i).real();
    v -= a * std::log(a);
  }
  return v;
}

ProblemSpec nearest_state_problem(const CMat& x0) { return state_problem("epi_qre", x0, 1.0); }

ProblemSpec nearest_state_qalpha_problem(const CMat& x0) {
  return state_problem("hypo_qalpha:0.5", x0, -1.0);
}

ProblemSpec dbs_feasibility_problem(const CMat& x0) { return state_problem("epi_dbs", x0, 1.0); }

ProblemSpec commuting_qalpha_problem(const RVec& x, const RVec& y) {
  const int n = static_cast<int>(x.size());
  ProblemSpec p;
  p.cones.push_back(make_cone("hypo_qalpha:0.5", n));
  const ConeSpec& c = p.cones[0];
  const int d = c.dim();
  p.c = RVec::Zero(d);
  p.c(d - 1) = -1.0;
  const CMat xm = x.cast<Complex>().asDiagonal();
  const CMat ym = y.cast<Complex>().asDiagonal();
  std::vector<RVec> rows;
  std::vector<double> rhs;
  fix_coords(rows, rhs, d, 0, hvec(xm));
  fix_coords(rows, rhs, d, n * n, hvec(ym));
  set_constraints(p, rows, rhs);
  p.start = {unit_slack_point(c, xm, ym)};
  return p;
}

ProblemSpec trace_persp_log_problem(const RVec& dvec) {
  const int n = static_cast<int>(dvec.size());
  ProblemSpec p;
  p.cones.push_back(make_cone("trace_persp_hypo:log", n));
  const ConeSpec& c = p.cones[0];
  const int d = c.dim();
  p.c = RVec::Zero(d);
  p.c(d - 1) = -1.0;
  std::vector<RVec> rows;
  std::vector<double> rhs;
  fix_coords(rows, rhs, d, 0, RVec::Ones(1));
  RVec w = RVec::Zero(n * n);
  w.head(n) = dvec;
  trace_row(rows, rhs, d, 1, w, 1.0);
  set_constraints(p, rows, rhs);
  const CMat y0 = (1.0 / dvec.sum()) * CMat::Identity(n, n);
  p.start = {unit_slack_point(c, CMat::Identity(1, 1), y0)};
  return p;
}

}  // namespace qcone
