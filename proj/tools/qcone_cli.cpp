// qcone: solve conic problems, evaluate barriers, run certification suites.
//
// Exit codes:
//   0  success (Optimal, or all checks passed)
//   2  usage or parse error
//   3  infeasible start / point not interior
//   4  iteration limit
//   5  numerical failure
//   6  certification check failed

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcone/certify.hpp"
#include "qcone/ipm.hpp"
#include "qcone/problem_io.hpp"

namespace {

using json = nlohmann::json;
using namespace qcone;

enum Exit { kOk = 0, kParse = 2, kInfeasible = 3, kIterLimit = 4, kNumerical = 5, kCheckFailed = 6 };

int exit_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return kOk;
    case SolveStatus::InfeasibleStart:
      return kInfeasible;
    case SolveStatus::IterLimit:
      return kIterLimit;
    default:
      return kNumerical;
  }
}

json vec_json(const RVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

std::vector<CMat> load_kraus(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0, "");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), 0, 0, "");
  }
  std::vector<CMat> out;
  for (const auto& m : j) {
    const int r = static_cast<int>(m.size());
    const int c = static_cast<int>(m.at(0).size());
    CMat k(r, c);
    for (int i = 0; i < r; ++i)
      for (int l = 0; l < c; ++l) k(i, l) = Complex(m[i][l][0].get<double>(), m[i][l][1].get<double>());
    out.push_back(k);
  }
  return out;
}

ConeSpec cone_from(const std::string& kind, int n, const std::string& kraus_path) {
  try {
    return make_cone(kind, n, load_kraus(kraus_path));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("--cone: ") + e.what(), 0, 0, "");
  }
}

json report_json(const CertReport& r) {
  return {{"check", r.check},       {"subject", r.subject},   {"samples", r.samples},
          {"skipped", r.skipped},   {"seed", r.seed},         {"worst", r.worst},
          {"best", r.best},         {"threshold", r.threshold}, {"pass", r.pass},
          {"worst_sample", r.worst_sample}, {"note", r.note}};
}

void print_report(const CertReport& r) {
  std::cout << report_json(r).dump() << '\n';
  std::cout << "# " << r.check << " on " << r.subject << ": worst " << std::setprecision(12)
            << r.worst << " vs threshold " << r.threshold << " over " << r.samples
            << " samples (" << r.skipped << " skipped) -> " << (r.pass ? "PASS" : "FAIL");
  if (!r.note.empty()) std::cout << " [" << r.note << "]";
  std::cout << '\n';
}

void print_certificate(const LBCertificate& c) {
  json prem = json::array();
  for (const auto& p : c.premises) prem.push_back({{"name", p.name}, {"ok", p.ok}});
  json j = {{"cone", c.cone},       {"eps", c.eps},     {"n_dirs", c.n_dirs},
            {"m", c.m},             {"tau_prime", c.tau_prime}, {"tau", c.tau},
            {"bound", c.bound},     {"bound_at_tau", c.bound_at_tau},
            {"premises", prem},     {"valid", c.valid}, {"failed", c.failed}};
  std::cout << j.dump() << '\n';
  std::cout << std::setprecision(12);
  std::cout << "# bound = N / ((N - 1) eps + 1) + m = " << c.n_dirs << " / ((" << c.n_dirs
            << " - 1) * " << c.eps << " + 1) + " << c.m << " = " << c.bound << '\n';
  std::cout << "# a_i = 1, b_i = " << (c.b.empty() ? 0.0 : c.b.front())
            << ", a'_i = b'_i = 1, tau' = " << c.tau_prime << ", tau = " << c.tau << '\n';
  for (const auto& p : c.premises) {
    std::cout << "# premise " << (p.ok ? "ok  " : "FAIL") << "  " << p.name << '\n';
  }
  std::cout << "# certificate " << (c.valid ? "valid" : "INVALID (" + c.failed + ")") << '\n';
}

struct SolveArgs {
  std::string path;
  double eps = 0.0;
  std::string mode;
  std::string trace;
  double long_step_factor = 0.0;
  double center_tol = 0.0;
  int max_iter = 0;
  bool print_point = false;
};

int cmd_solve(const SolveArgs& a) {
  const ProblemFile f = load_problem(a.path);
  SolverOptions opt = f.solver.value_or(SolverOptions{});
  if (a.eps > 0.0) opt.eps = a.eps;
  if (!a.mode.empty()) opt.mode = parse_mode(a.mode);
  if (a.long_step_factor > 0.0) opt.long_step_factor = a.long_step_factor;
  if (a.center_tol > 0.0) opt.center_tol = a.center_tol;
  if (a.max_iter > 0) opt.max_iter = a.max_iter;
  const SolveResult r = solve(f.problem, opt);
  std::cout << std::setprecision(15);
  std::cout << "problem     " << (f.name.empty() ? a.path : f.name) << '\n';
  std::cout << "status      " << to_string(r.status) << '\n';
  std::cout << "objective   " << r.objective << '\n';
  std::cout << "gap_bound   " << r.gap_bound << '\n';
  std::cout << "t           " << r.t << '\n';
  std::cout << "outer_iters " << r.outer_iterations << '\n';
  std::cout << "newton      " << r.newton_steps << '\n';
  std::cout << "residual    " << r.residual << '\n';
  if (f.expected_objective) {
    std::cout << "expected    " << *f.expected_objective << "  (diff "
              << r.objective - *f.expected_objective << ")\n";
  }
  if (!r.message.empty()) std::cout << "message     " << r.message << '\n';
  if (a.print_point) std::cout << "x           " << vec_json(r.x).dump() << '\n';
  if (!a.trace.empty()) {
    std::ofstream out(a.trace);
    if (!out) {
      std::cerr << "cannot write trace to '" << a.trace << "'\n";
      return kParse;
    }
    out << trace_csv(r);
  }
  return exit_for(r.status);
}

struct EvalArgs {
  std::string cone;
  int n = 2;
  std::string kraus;
  std::string point;
  bool hessian = false;
};

int cmd_eval(const EvalArgs& a) {
  const ConeSpec c = cone_from(a.cone, a.n, a.kraus);
  const ConePoint p = a.point.empty() ? feasible_start(c) : load_point(c, a.point);
  const InteriorStatus st = interior_status(c, p);
  if (st != InteriorStatus::Interior) {
    std::cerr << "point is not interior: " << to_string(st) << '\n';
    return kInfeasible;
  }
  const BarrierEval e = barrier_eval(c, p, a.hessian ? 2 : 1);
  json j = {{"cone", c.to_string()}, {"n", c.n}, {"nu", c.nu()}, {"value", e.value},
            {"grad", vec_json(e.grad)}};
  if (a.hessian) {
    json h = json::array();
    for (int i = 0; i < e.hess.rows(); ++i) h.push_back(vec_json(e.hess.row(i).transpose()));
    j["hessian"] = h;
  }
  std::cout << j.dump() << '\n';
  std::cout << std::setprecision(15) << "# value " << e.value << ", <grad, x> "
            << e.grad.dot(to_vec(c, p)) << " (expected -" << c.nu() << ")\n";
  return kOk;
}

struct CertifyArgs {
  std::string suite;
  std::string cone;
  int n = 2;
  std::string kraus;
  std::uint64_t seed = 1;
  int samples = 100;
  double eps = 1e-4;
  double beta = 1.0;
  bool rank_one = false;
};

int cmd_certify(const CertifyArgs& a) {
  const std::vector<double> s_values{0.0, 0.25, 0.5, 0.75, 1.0};
  CertReport r;
  if (a.suite == "compat") {
    r = check_compat(a.n, a.samples, a.seed, s_values, false, a.beta);
  } else if (a.suite == "compat_tensor") {
    r = check_compat(a.n, a.samples, a.seed, s_values, true, a.beta);
  } else if (a.suite == "tensor") {
    r = check_tensor_identity(a.n, a.samples, a.seed);
  } else if (a.suite == "logdet") {
    r = check_sc_logdet(a.n, a.samples, a.seed, a.rank_one);
  } else {
    if (a.cone.empty()) throw ParseError("--suite " + a.suite + " needs --cone", 0, 0, "");
    const ConeSpec c = cone_from(a.cone, a.n, a.kraus);
    if (a.suite == "sc") {
      r = check_sc(c, a.samples, a.seed);
    } else if (a.suite == "nu") {
      r = check_nu(c, a.samples, a.seed);
    } else if (a.suite == "lb") {
      const LBCertificate cert = lb_certificate(c, a.eps);
      print_certificate(cert);
      return cert.valid ? kOk : kCheckFailed;
    } else {
      throw ParseError("unknown suite '" + a.suite + "'", 0, 0, "");
    }
  }
  print_report(r);
  return r.pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcone: optimal barriers for quantum relative entropy cones"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "qcone 0.1.0");

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("problem", sa.path, "Problem file (JSON, version 1)")->required();
  solve_cmd->add_option("--eps", sa.eps, "Target gap bound nu/t");
  solve_cmd->add_option("--mode", sa.mode, "short-step or long-step")
      ->check(CLI::IsMember({"short-step", "long-step", "short", "long"}));
  solve_cmd->add_option("--trace", sa.trace, "Write iteration trace CSV");
  solve_cmd->add_option("--long-step-factor", sa.long_step_factor, "t multiplier in long-step mode");
  solve_cmd->add_option("--center-tol", sa.center_tol, "Centering decrement tolerance");
  solve_cmd->add_option("--max-iter", sa.max_iter, "Outer iteration cap");
  solve_cmd->add_flag("--print-point", sa.print_point, "Print the final point");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a barrier at a point");
  eval_cmd->add_option("--cone", ea.cone, "Cone kind, e.g. epi_qre or hypo_qalpha:0.5")->required();
  eval_cmd->add_option("--n", ea.n, "Matrix size")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--kraus", ea.kraus, "JSON file with Kraus operators");
  eval_cmd->add_option("--point", ea.point, "Point file {X, Y, Z}; default is the canonical start");
  eval_cmd->add_flag("--hessian", ea.hessian, "Also print the Hessian");

  CertifyArgs ca;
  auto* cert_cmd = app.add_subcommand("certify", "Run a sampled certification suite");
  cert_cmd->add_option("--suite", ca.suite, "sc | nu | compat | compat_tensor | tensor | logdet | lb")
      ->required()
      ->check(CLI::IsMember({"sc", "nu", "compat", "compat_tensor", "tensor", "logdet", "lb"}));
  cert_cmd->add_option("--cone", ca.cone, "Cone kind (sc, nu, lb)");
  cert_cmd->add_option("--n", ca.n, "Matrix size")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--kraus", ca.kraus, "JSON file with Kraus operators");
  cert_cmd->add_option("--seed", ca.seed, "RNG seed");
  cert_cmd->add_option("--samples", ca.samples, "Sample count")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--eps", ca.eps, "Certificate parameter (lb)");
  cert_cmd->add_option("--beta", ca.beta, "Compatibility constant (compat suites)");
  cert_cmd->add_flag("--rank-one", ca.rank_one, "Rank-one directions (logdet)");

  CertifyArgs la;
  auto* lb_cmd = app.add_subcommand("lb", "Barrier-parameter lower-bound certificate");
  lb_cmd->add_option("--cone", la.cone, "Cone kind")->required();
  lb_cmd->add_option("--n", la.n, "Matrix size")->check(CLI::PositiveNumber);
  lb_cmd->add_option("--kraus", la.kraus, "JSON file with Kraus operators");
  lb_cmd->add_option("--eps", la.eps, "Certificate parameter in (0,1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kParse;
  }

  try {
    if (*solve_cmd) return cmd_solve(sa);
    if (*eval_cmd) return cmd_eval(ea);
    if (*cert_cmd) return cmd_certify(ca);
    la.suite = "lb";
    return cmd_certify(la);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const NotInteriorError& e) {
    std::cerr << "not interior: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
