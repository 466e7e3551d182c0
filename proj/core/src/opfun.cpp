#include "qcone/opfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qcone {

namespace {

constexpr double kPi = std::numbers::pi;
// Tail exponent: node windows stop where the integrand falls below e^(-2K).
constexpr double kTailExp = 17.0;
constexpr int kMaxNodes = 480;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

std::string fmt_param(double p) {
  std::ostringstream os;
  os << p;
  return os.str();
}

OpConcaveFn make_log() {
  OpConcaveFn g;
  g.name = "log";
  g.fn = fn::log();
  g.g1 = 0.0;
  g.gp1 = 1.0;
  g.limit = {false, true};
  g.density = {{1.0, 1.0, 0.0}};
  return g;
}

OpConcaveFn make_pow(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("pow:" + fmt_param(p) +
                                " is not operator concave (x^p requires p in [0,1])");
  }
  OpConcaveFn g;
  g.name = "pow:" + fmt_param(p);
  g.fn = fn::power(p);
  g.fn.name = g.name;
  g.g1 = 1.0;
  g.gp1 = p;
  g.limit = {true, true};
  if (p > 0.0 && p < 1.0) g.density = {{std::sin(p * kPi) / kPi, 1.0 - p, p}};
  return g;
}

OpConcaveFn make_negpow(double p) {
  bool ok = (p >= -1.0 && p < 0.0) || (p > 1.0 && p <= 2.0);
  if (!ok) {
    throw std::invalid_argument("negpow:" + fmt_param(p) +
                                " is not operator concave (-x^p requires p in [-1,0) or (1,2])");
  }
  OpConcaveFn g;
  g.name = "negpow:" + fmt_param(p);
  g.fn = ScalarFn{[p](double x) { return -std::pow(x, p); },
                  [p](double x) { return -p * std::pow(x, p - 1.0); },
                  [p](double x) { return -p * (p - 1.0) * std::pow(x, p - 2.0); }, 0.0, true,
                  g.name};
  g.g1 = -1.0;
  g.gp1 = -p;
  g.limit = {p > 0.0, p < 1.0};
  if (p == 2.0) {
    g.atoms = {{0.0, 1.0}};
  } else if (p == -1.0) {
    g.atoms = {{1.0, 1.0}};
  } else {
    g.density = {{std::abs(std::sin(p * kPi)) / kPi, 1.0 - p, p}};
  }
  return g;
}

OpConcaveFn make_pair(double a) {
  if (!(a > 1.0 && a <= 2.0)) {
    throw std::invalid_argument("neg_pow_pair:" + fmt_param(a) + " requires a in (1,2]");
  }
  OpConcaveFn ga = make_negpow(a);
  OpConcaveFn gb = make_negpow(1.0 - a);
  OpConcaveFn g;
  g.name = "neg_pow_pair:" + fmt_param(a);
  ScalarFn fa = ga.fn;
  ScalarFn fb = gb.fn;
  g.fn = ScalarFn{[fa, fb](double x) { return fa.f(x) + fb.f(x); },
                  [fa, fb](double x) { return fa.df(x) + fb.df(x); },
                  [fa, fb](double x) { return fa.d2f(x) + fb.d2f(x); }, 0.0, true, g.name};
  g.g1 = ga.g1 + gb.g1;
  g.gp1 = ga.gp1 + gb.gp1;
  g.limit = {false, false};
  g.density = ga.density;
  g.density.insert(g.density.end(), gb.density.begin(), gb.density.end());
  g.atoms = ga.atoms;
  g.atoms.insert(g.atoms.end(), gb.atoms.begin(), gb.atoms.end());
  return g;
}

void finalize(OpConcaveFn& g) {
  int n = kDefaultNodes;
  double res = 0.0;
  for (; n <= kMaxNodes; n *= 2) {
    g.measure = build_measure(g, n);
    res = max_measure_residual(g, g.measure);
    if (res <= kMeasureTol) return;
  }
  std::ostringstream os;
  os << "measure for " << g.name << " failed validation: max residual " << res << " at "
     << kMaxNodes << " nodes";
  throw std::runtime_error(os.str());
}

}  // namespace

double QuadMeasure::mass() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double OpConcaveFn::represent(double x) const { return represent(x, measure); }

double OpConcaveFn::represent(double x, const QuadMeasure& mu) const {
  const double d = x - 1.0;
  double acc = 0.0;
  for (int k = 0; k < mu.count(); ++k) {
    acc += mu.weights[k] * d * d / (mu.comp[k] + mu.nodes[k] * x);
  }
  return g1 + gp1 * d - acc;
}

QuadMeasure build_measure(const OpConcaveFn& g, int n_nodes) {
  if (n_nodes < 2) throw std::invalid_argument("build_measure: need at least 2 nodes");
  struct Node {
    double s, c, w;
  };
  std::vector<Node> all;
  for (const auto& t : g.density) {
    const double a_left = std::max(4.0, kTailExp / (t.b + 1.0));
    const double a_right = std::max(4.0, kTailExp / (t.a + 1.0));
    const double v_lo = -std::asinh(2.0 * a_left / kPi);
    const double v_hi = std::asinh(2.0 * a_right / kPi);
    const double h = (v_hi - v_lo) / (n_nodes - 1);
    for (int k = 0; k < n_nodes; ++k) {
      const double v = v_lo + h * k;
      const double big_a = 0.5 * kPi * std::sinh(v);
      const double log_s = -softplus(-2.0 * big_a);
      const double log_c = -softplus(2.0 * big_a);
      const double log_w = std::log(t.c * h * kPi * std::cosh(v)) + (t.b + 1.0) * log_s +
                           (t.a + 1.0) * log_c;
      const double w = std::exp(log_w);
      if (w > 0.0) all.push_back({std::exp(log_s), std::exp(log_c), w});
    }
  }
  for (const auto& p : g.atoms) all.push_back({p.s, 1.0 - p.s, p.w});
  std::sort(all.begin(), all.end(), [](const Node& x, const Node& y) { return x.s < y.s; });
  QuadMeasure mu;
  for (const auto& nd : all) {
    mu.nodes.push_back(nd.s);
    mu.comp.push_back(nd.c);
    mu.weights.push_back(nd.w);
  }
  return mu;
}

double max_measure_residual(const OpConcaveFn& g, const QuadMeasure& mu) {
  constexpr int kGrid = 50;
  double worst = 0.0;
  const double lo = std::log(kQuadRangeLo);
  const double hi = std::log(kQuadRangeHi);
  for (int i = 0; i < kGrid; ++i) {
    const double x = std::exp(lo + (hi - lo) * i / (kGrid - 1));
    const double gx = g(x);
    worst = std::max(worst, std::abs(gx - g.represent(x, mu)) / (1.0 + std::abs(gx)));
  }
  return worst;
}

OpConcaveFn catalog(const std::string& name, double param) {
  OpConcaveFn g;
  if (name == "log") {
    g = make_log();
  } else if (name == "pow") {
    g = make_pow(param);
  } else if (name == "negpow") {
    g = make_negpow(param);
  } else if (name == "one_minus_alpha_pow") {
    const double p = 1.0 - param;
    g = (param >= 0.0 && param <= 1.0) ? make_pow(p) : make_negpow(p);
    g.name = "one_minus_alpha_pow:" + fmt_param(param);
  } else if (name == "neg_pow_pair") {
    g = make_pair(param);
  } else {
    throw std::invalid_argument("unknown operator concave function '" + name + "'");
  }
  finalize(g);
  return g;
}

OpConcaveFn catalog(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    if (spec != "log") {
      throw std::invalid_argument("function '" + spec + "' needs a parameter (name:value)");
    }
    return catalog(spec, 0.0);
  }
  const std::string name = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  double p = 0.0;
  try {
    std::size_t used = 0;
    p = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad parameter '" + arg + "' in function '" + spec + "'");
  }
  return catalog(name, p);
}

OpConcaveFn transpose_fn(const OpConcaveFn& g) {
  OpConcaveFn t;
  t.name = "transpose(" + g.name + ")";
  ScalarFn f = g.fn;
  t.fn = ScalarFn{[f](double x) { return x * f.f(1.0 / x); },
                  [f](double x) { return f.f(1.0 / x) - f.df(1.0 / x) / x; },
                  [f](double x) { return f.d2f(1.0 / x) / (x * x * x); }, 0.0, true, t.name};
  t.g1 = g.g1;
  t.gp1 = g.g1 - g.gp1;
  t.limit = {g.limit.ghat_finite, g.limit.g_finite};
  for (const auto& d : g.density) t.density.push_back({d.c, d.a, d.b});
  for (const auto& p : g.atoms) t.atoms.push_back({1.0 - p.s, p.w});
  const auto& m = g.measure;
  for (int k = m.count() - 1; k >= 0; --k) {
    t.measure.nodes.push_back(m.comp[k]);
    t.measure.comp.push_back(m.nodes[k]);
    t.measure.weights.push_back(m.weights[k]);
  }
  return t;
}

DomainCase domain_case(const OpConcaveFn& g) {
  const bool a = g.limit.g_finite;
  const bool b = g.limit.ghat_finite;
  if (a && b) return DomainCase::I;
  if (!a && b) return DomainCase::II;
  if (a && !b) return DomainCase::III;
  return DomainCase::IV;
}

const char* to_string(DomainCase c) {
  switch (c) {
    case DomainCase::I:
      return "i";
    case DomainCase::II:
      return "ii";
    case DomainCase::III:
      return "iii";
    default:
      return "iv";
  }
}

}  // namespace qcone
