#pragma once

// The rational maps xi_s, noncommutative perspectives P_g (spectral and
// quadrature routes), their directional derivatives and the tensor lifts.

#include <vector>

#include "qcone/herm.hpp"
#include "qcone/opfun.hpp"

namespace qcone {

/// Raised when the ratio spectrum of X^{-1/2} Y X^{-1/2} leaves the range on
/// which the quadrature measure was validated.
class QuadRangeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// xi_s(X, Y) = -(Y - X) ((1-s) X + s Y)^{-1} (Y - X).
HermMatrix xi(double s, const HermMatrix& x, const HermMatrix& y);

/// k-th directional derivative of xi_s along (H, V), any k >= 1.
HermMatrix xi_deriv(double s, const HermMatrix& x, const HermMatrix& y, const HermMatrix& h,
                    const HermMatrix& v, int k);
/// Same with the complement 1 - s supplied separately; raw matrices.
CMat xi_deriv_raw(double s, double sc, const CMat& x, const CMat& y, const CMat& h,
                  const CMat& v, int k);

/// Eigenvalues of X^{-1/2} Y X^{-1/2}.
RVec ratio_spectrum(const HermMatrix& x, const HermMatrix& y);

/// Spectral route X^{1/2} g(X^{-1/2} Y X^{-1/2}) X^{1/2}.
HermMatrix persp(const OpConcaveFn& g, const HermMatrix& x, const HermMatrix& y);

/// Quadrature route g(1) X + g'(1)(Y - X) + sum_k w_k xi_{s_k}(X, Y).
/// Throws QuadRangeError when the ratio spectrum is outside the validated range.
HermMatrix persp_quad(const OpConcaveFn& g, const HermMatrix& x, const HermMatrix& y);

/// k-th directional derivative of the quadrature perspective (k in 1..3).
HermMatrix persp_deriv(const OpConcaveFn& g, const HermMatrix& x, const HermMatrix& y,
                       const HermMatrix& h, const HermMatrix& v, int k);

/// Quadrature perspective with per-node factorizations cached at (X, Y).
/// Exactly 1-homogeneous and jointly concave for any positive weights, so it
/// is used unchecked inside barriers.
class PerspQuadModel {
 public:
  PerspQuadModel(const OpConcaveFn& g, const CMat& x, const CMat& y);

  const CMat& value() const { return value_; }
  /// DP[H, V].
  CMat d1(const CMat& h, const CMat& v) const;
  /// Gradient of (X, Y) -> tr(W P(X, Y)).
  void weighted_grad(const CMat& w, CMat& gx, CMat& gy) const;
  /// Hessian of (X, Y) -> tr(W P(X, Y)) applied to (H, V).
  void weighted_hessvec(const CMat& w, const CMat& h, const CMat& v, CMat& hx, CMat& hy) const;

 private:
  double g1_;
  double gp1_;
  const QuadMeasure* mu_;
  CMat delta_;
  std::vector<CMat> m_;   // ((1-s) X + s Y)^{-1}
  std::vector<CMat> md_;  // m_ * delta_
  CMat value_;
};

/// -X log X (x) I + X (x) conj(log Y) = P_log(X (x) I, I (x) conj(Y)).
HermMatrix tensor_log(const HermMatrix& x, const HermMatrix& y);
/// X^alpha (x) conj(Y)^(1-alpha) = P_{x^(1-alpha)}(X (x) I, I (x) conj(Y)).
HermMatrix tensor_pow(double alpha, const HermMatrix& x, const HermMatrix& y);

}  // namespace qcone
