#pragma once

// Trace-form divergences: D, Q_alpha, D_BS, Qhat_alpha and the trace
// perspective x tr f(Y/x), with exact gradients and Hessian-vector products.

#include <memory>

#include "qcone/herm.hpp"
#include "qcone/opfun.hpp"
#include "qcone/perspective.hpp"

namespace qcone {

/// tr(X log X - X log Y).
double qre(const HermMatrix& x, const HermMatrix& y);
/// tr(X^alpha Y^(1-alpha)).
double qalpha(double alpha, const HermMatrix& x, const HermMatrix& y);
/// tr(X log(X^{1/2} Y^{-1} X^{1/2})) = -tr P_log(X, Y).
double dbs(const HermMatrix& x, const HermMatrix& y);
/// tr(X (X^{-1/2} Y X^{-1/2})^(1-alpha)).
double qhat(double alpha, const HermMatrix& x, const HermMatrix& y);
/// x tr f(Y/x).
double trace_persp(const OpConcaveFn& f, double x, const HermMatrix& y);

/// Smooth scalar function of a pair of Hermitian matrices. Gradients are
/// Hermitian matrices G with Df[H] = tr(G H).
class SplitForm {
 public:
  virtual ~SplitForm() = default;
  virtual double value() const = 0;
  virtual void grad(CMat& gx, CMat& gy) const = 0;
  virtual void hessvec(const CMat& h, const CMat& v, CMat& hx, CMat& hy) const = 0;

  /// Directional derivative of order k in {1, 2}.
  double deriv(const CMat& h, const CMat& v, int k) const;
};

std::unique_ptr<SplitForm> make_qre_form(const CMat& x, const CMat& y);
std::unique_ptr<SplitForm> make_qalpha_form(double alpha, const CMat& x, const CMat& y);
/// X is the 1x1 matrix [x].
std::unique_ptr<SplitForm> make_trace_persp_form(const OpConcaveFn& f, const CMat& x,
                                                 const CMat& y);
/// sign * tr P_g(X, Y) through the quadrature model.
std::unique_ptr<SplitForm> make_trace_quad_form(const OpConcaveFn& g, double sign, const CMat& x,
                                                const CMat& y);

}  // namespace qcone
