#include "qcone/ipm.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace qcone {

namespace {

struct BlockState {
  std::vector<RMat> rest;
  std::vector<RMat> jac;
  RVec grad;
};

std::vector<int> offsets(const ProblemSpec& p) {
  std::vector<int> off{0};
  for (const auto& c : p.cones) off.push_back(off.back() + c.dim());
  return off;
}

bool all_interior(const ProblemSpec& p, const RVec& x) {
  const auto off = offsets(p);
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    const auto& c = p.cones[k];
    if (!interior(c, from_vec(c, x.segment(off[k], c.dim())))) return false;
  }
  return true;
}

BlockState evaluate(const ProblemSpec& p, const RVec& x) {
  const auto off = offsets(p);
  BlockState s;
  s.grad.resize(x.size());
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    const auto& c = p.cones[k];
    BarrierOracle o(c, from_vec(c, x.segment(off[k], c.dim())));
    s.grad.segment(off[k], c.dim()) = o.grad();
    RMat r, jm;
    o.hessian_factored(r, jm);
    s.rest.push_back(std::move(r));
    s.jac.push_back(std::move(jm));
  }
  return s;
}

double cond_estimate(const RMat& h) {
  Eigen::SelfAdjointEigenSolver<RMat> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo > 0.0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

double hess_form(const BlockState& st, const std::vector<int>& off, const RVec& v) {
  double q = 0.0;
  for (std::size_t k = 0; k < st.rest.size(); ++k) {
    const int d = static_cast<int>(st.rest[k].rows());
    const auto seg = v.segment(off[k], d);
    q += seg.dot(st.rest[k] * seg) + (st.jac[k].transpose() * seg).squaredNorm();
  }
  return q;
}

// Solves the augmented KKT system
//   [R  A^T  J] [dx ]   [-gt]
//   [A  0    0] [lam] = [ r ]
//   [J^T 0  -I] [w  ]   [ 0 ]
// whose elimination of w gives (R + J J^T) dx + A^T lam = -gt. Symmetric Ruiz
// equilibration, full-pivot LU and one refinement step.
bool kkt_solve(const ProblemSpec& p, const BlockState& st, const RVec& gt, const RVec& r,
               RVec& dx, std::string& diag) {
  const auto off = offsets(p);
  const int n = static_cast<int>(gt.size());
  const int m = static_cast<int>(p.A.rows());
  std::vector<int> joff{n + m};
  for (const auto& jm : st.jac) joff.push_back(joff.back() + static_cast<int>(jm.cols()));
  const int total = joff.back();
  RMat kkt = RMat::Zero(total, total);
  for (std::size_t k = 0; k < st.rest.size(); ++k) {
    const int d = static_cast<int>(st.rest[k].rows());
    const int rk = static_cast<int>(st.jac[k].cols());
    kkt.block(off[k], off[k], d, d) = st.rest[k];
    kkt.block(off[k], joff[k], d, rk) = st.jac[k];
    kkt.block(joff[k], off[k], rk, d) = st.jac[k].transpose();
    kkt.block(joff[k], joff[k], rk, rk) = -RMat::Identity(rk, rk);
  }
  if (m > 0) {
    kkt.block(0, n, n, m) = p.A.transpose();
    kkt.block(n, 0, m, n) = p.A;
  }
  RVec rhs = RVec::Zero(total);
  rhs.head(n) = -gt;
  if (m > 0) rhs.segment(n, m) = r;

  RVec sol;
  if (!solve_equilibrated(kkt, rhs, sol)) {
    std::ostringstream os;
    os << "KKT system is singular (" << total << " x " << total
       << "); block Hessian condition numbers:";
    for (std::size_t k = 0; k < st.rest.size(); ++k) {
      os << ' ' << std::setprecision(3)
         << cond_estimate(st.rest[k] + st.jac[k] * st.jac[k].transpose());
    }
    diag = os.str();
    return false;
  }
  dx = sol.head(n);
  return dx.allFinite();
}

double residual_norm(const ProblemSpec& p, const RVec& x) {
  return p.A.rows() == 0 ? 0.0 : (p.b - p.A * x).norm();
}

void fill_result(const ProblemSpec& p, const RVec& x, double t, SolveResult& r) {
  r.x = x;
  r.points = split_points(p, x);
  r.objective = p.c.dot(x);
  r.t = t;
  r.gap_bound = p.nu() / t;
  r.residual = residual_norm(p, x);
}

}  // namespace

int ProblemSpec::dim() const {
  int d = 0;
  for (const auto& c : cones) d += c.dim();
  return d;
}

int ProblemSpec::nu() const {
  int v = 0;
  for (const auto& c : cones) v += c.nu();
  return v;
}

void ProblemSpec::validate() const {
  if (cones.empty()) throw ShapeError("problem has no cone blocks");
  const int d = dim();
  if (c.size() != d) {
    throw ShapeError("objective has length " + std::to_string(c.size()) + ", expected " +
                     std::to_string(d));
  }
  if (A.cols() != d && A.rows() > 0) {
    throw ShapeError("constraint matrix has " + std::to_string(A.cols()) + " columns, expected " +
                     std::to_string(d));
  }
  if (A.rows() != b.size()) {
    throw ShapeError("constraint matrix has " + std::to_string(A.rows()) +
                     " rows but b has length " + std::to_string(b.size()));
  }
  if (!start.empty()) {
    if (start.size() != cones.size()) throw ShapeError("start must give one point per cone block");
    for (std::size_t k = 0; k < cones.size(); ++k) check_shape(cones[k], start[k]);
  }
  if (A.rows() > 0) {
    Eigen::ColPivHouseholderQR<RMat> qr(A.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() < A.rows()) {
      throw std::invalid_argument("constraint matrix is rank deficient (rank " +
                                  std::to_string(qr.rank()) + " < " + std::to_string(A.rows()) +
                                  ")");
    }
  }
}

RVec concat_points(const ProblemSpec& p, const std::vector<ConePoint>& pts) {
  const auto off = offsets(p);
  RVec x(off.back());
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    x.segment(off[k], p.cones[k].dim()) = to_vec(p.cones[k], pts[k]);
  }
  return x;
}

std::vector<ConePoint> split_points(const ProblemSpec& p, const RVec& x) {
  const auto off = offsets(p);
  std::vector<ConePoint> pts;
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    pts.push_back(from_vec(p.cones[k], x.segment(off[k], p.cones[k].dim())));
  }
  return pts;
}

const char* to_string(SolveMode m) {
  return m == SolveMode::ShortStep ? "short-step" : "long-step";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::InfeasibleStart:
      return "InfeasibleStart";
    case SolveStatus::IterLimit:
      return "IterLimit";
    default:
      return "NumericalFailure";
  }
}

SolveMode parse_mode(const std::string& s) {
  if (s == "short-step" || s == "short") return SolveMode::ShortStep;
  if (s == "long-step" || s == "long") return SolveMode::LongStep;
  throw std::invalid_argument("unknown solver mode '" + s + "' (expected short-step or long-step)");
}

CenterResult newton_step(const ProblemSpec& p, const RVec& x, double t) {
  CenterResult res;
  res.x = x;
  BlockState st;
  try {
    st = evaluate(p, x);
  } catch (const std::exception& e) {
    res.message = std::string("barrier evaluation failed: ") + e.what();
    return res;
  }
  const RVec gt = t * p.c + st.grad;
  const RVec r = p.A.rows() == 0 ? RVec() : RVec(p.b - p.A * x);
  RVec dx;
  if (!kkt_solve(p, st, gt, r, dx, res.message)) {
    if (res.message.empty()) res.message = "Newton system produced non-finite values";
    return res;
  }
  const auto off = offsets(p);
  const double dec2 = hess_form(st, off, dx);
  res.decrement = std::sqrt(std::max(0.0, dec2));
  double alpha = res.decrement > 0.25 ? 1.0 / (1.0 + res.decrement) : 1.0;
  for (int halvings = 0;; ++halvings) {
    const RVec cand = x + alpha * dx;
    bool inside = false;
    try {
      inside = all_interior(p, cand);
    } catch (const std::exception&) {
      inside = false;
    }
    if (inside) {
      res.x = cand;
      break;
    }
    if (halvings >= 60) {
      res.message = "line search could not stay interior";
      return res;
    }
    alpha *= 0.5;
  }
  res.steps = 1;
  res.ok = true;
  return res;
}

CenterResult newton_center(const ProblemSpec& p, const RVec& x, double t, double tol,
                           int max_steps) {
  CenterResult out;
  out.x = x;
  out.ok = true;
  for (int k = 0; k < max_steps; ++k) {
    CenterResult s = newton_step(p, out.x, t);
    if (!s.ok) {
      out.ok = false;
      out.message = s.message;
      return out;
    }
    const double prev = k == 0 ? std::numeric_limits<double>::infinity() : out.decrement;
    out.decrement = s.decrement;
    if (s.decrement <= tol) return out;
    if (s.decrement < 1e-4 && s.decrement > 0.5 * prev) {
      out.ok = false;
      out.message = "decrement stalled at " + std::to_string(s.decrement);
      return out;
    }
    out.x = s.x;
    ++out.steps;
  }
  // One more decrement evaluation at the last iterate.
  CenterResult s = newton_step(p, out.x, t);
  out.decrement = s.decrement;
  out.ok = s.ok && s.decrement <= tol;
  if (!out.ok) out.message = s.ok ? "centering did not converge" : s.message;
  return out;
}

SolveResult solve(const ProblemSpec& p, const SolverOptions& opt) {
  p.validate();
  SolveResult res;
  const double nu = p.nu();
  const double bscale = 1.0 + (p.b.size() ? p.b.norm() : 0.0);

  std::vector<ConePoint> pts = p.start;
  if (pts.empty()) {
    for (const auto& c : p.cones) pts.push_back(feasible_start(c));
  }
  RVec x = concat_points(p, pts);
  fill_result(p, x, opt.t0, res);
  if (residual_norm(p, x) > 1e-8 * bscale) {
    res.status = SolveStatus::InfeasibleStart;
    res.message = "start violates A x = b (residual " + std::to_string(residual_norm(p, x)) + ")";
    return res;
  }
  const auto off = offsets(p);
  for (std::size_t k = 0; k < p.cones.size(); ++k) {
    const auto st = interior_status(p.cones[k], pts[k]);
    if (st != InteriorStatus::Interior) {
      res.status = SolveStatus::InfeasibleStart;
      res.message = "start block " + std::to_string(k) + " is not interior (" + to_string(st) + ")";
      return res;
    }
  }

  double t = opt.t0;
  CenterResult cr = newton_center(p, x, t, opt.center_tol, opt.max_newton);
  res.newton_steps += cr.steps;
  if (!cr.ok) {
    res.status = SolveStatus::NumericalFailure;
    res.message = "initial centering failed: " + cr.message;
    return res;
  }
  x = cr.x;
  res.trace.push_back({0, t, cr.decrement, p.c.dot(x), nu / t});

  const double short_factor = 1.0 + opt.short_step_gamma / std::sqrt(nu);
  int iter = 0;
  while (nu / t > opt.eps) {
    if (iter >= opt.max_iter) {
      fill_result(p, x, t, res);
      res.status = SolveStatus::IterLimit;
      res.outer_iterations = iter;
      res.message = "outer iteration limit reached";
      return res;
    }
    ++iter;
    if (opt.mode == SolveMode::LongStep) {
      t *= opt.long_step_factor;
      cr = newton_center(p, x, t, opt.center_tol, opt.max_newton);
    } else {
      t *= short_factor;
      cr = newton_step(p, x, t);
    }
    res.newton_steps += cr.steps;
    if (!cr.ok) {
      fill_result(p, x, t, res);
      res.status = SolveStatus::NumericalFailure;
      res.outer_iterations = iter;
      res.message = cr.message;
      return res;
    }
    x = cr.x;
    res.trace.push_back({iter, t, cr.decrement, p.c.dot(x), nu / t});
  }

  cr = newton_center(p, x, t, opt.final_center_tol, opt.max_newton);
  res.newton_steps += cr.steps;
  if (cr.steps > 0 || cr.ok) x = cr.x;
  fill_result(p, x, t, res);
  res.outer_iterations = iter;
  if (!cr.ok && cr.decrement > opt.center_tol) {
    res.status = SolveStatus::NumericalFailure;
    res.message = "final centering failed: " + cr.message;
    return res;
  }
  if (!cr.ok) res.message = "final decrement " + std::to_string(cr.decrement);
  res.status = res.residual <= 1e-8 * bscale ? SolveStatus::Optimal : SolveStatus::NumericalFailure;
  if (res.status != SolveStatus::Optimal) res.message = "equality residual too large";
  return res;
}

std::string trace_csv(const SolveResult& r) {
  std::ostringstream os;
  os << "iter,t,decrement,objective,gap_bound\n" << std::setprecision(17);
  for (const auto& row : r.trace) {
    os << row.iter << ',' << row.t << ',' << row.decrement << ',' << row.objective << ','
       << row.gap_bound << '\n';
  }
  return os.str();
}

}  // namespace qcone
