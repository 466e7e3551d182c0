#pragma once

// Operator concave functions on (0, inf), their transposes and representing
// measures g(x) = g(1) + g'(1)(x-1) - int_0^1 (x-1)^2 / (1 + s(x-1)) dmu(s).

#include <string>
#include <vector>

#include "qcone/herm.hpp"

namespace qcone {

/// Discretized measure on [0, 1]. comp[k] holds 1 - nodes[k] computed
/// without cancellation.
struct QuadMeasure {
  std::vector<double> nodes;
  std::vector<double> comp;
  std::vector<double> weights;

  int count() const { return static_cast<int>(nodes.size()); }
  double mass() const;
};

/// Absolutely continuous part c * s^b * (1-s)^a of a measure density.
struct DensityTerm {
  double c;
  double b;
  double a;
};

struct PointMass {
  double s;
  double w;
};

enum class DomainCase { I, II, III, IV };

struct LimitClass {
  bool g_finite;     // g(0+) > -inf
  bool ghat_finite;  // ghat(0+) > -inf
};

class OpConcaveFn {
 public:
  std::string name;
  ScalarFn fn;
  double g1 = 0.0;
  double gp1 = 0.0;
  LimitClass limit{true, true};
  std::vector<DensityTerm> density;
  std::vector<PointMass> atoms;
  QuadMeasure measure;

  double operator()(double x) const { return fn.f(x); }
  /// Value of the discretized integral representation at x.
  double represent(double x) const;
  /// Value of the representation with an explicit measure.
  double represent(double x, const QuadMeasure& mu) const;
};

/// Validated quadrature range of the ratio spectrum.
inline constexpr double kQuadRangeLo = 1e-3;
inline constexpr double kQuadRangeHi = 1e3;
inline constexpr double kMeasureTol = 1e-9;
inline constexpr int kDefaultNodes = 60;

/// Catalog entries: "log", "pow:p" (p in [0,1]), "negpow:p"
/// (p in [-1,0) or (1,2]), "one_minus_alpha_pow:a" (x^(1-a) or -x^(1-a)),
/// "neg_pow_pair:a" (-x^a - x^(1-a), a in (1,2]).
OpConcaveFn catalog(const std::string& spec);
OpConcaveFn catalog(const std::string& name, double param);

OpConcaveFn transpose_fn(const OpConcaveFn& g);

QuadMeasure build_measure(const OpConcaveFn& g, int n_nodes);

/// Largest scaled residual |g - represent| / (1 + |g|) on a 50-point
/// geometric grid over the validated range.
double max_measure_residual(const OpConcaveFn& g, const QuadMeasure& mu);

DomainCase domain_case(const OpConcaveFn& g);
const char* to_string(DomainCase c);

}  // namespace qcone
