#pragma once

// Hermitian matrix algebra: spectral decompositions, scalar-function lifting,
// divided-difference Frechet derivatives, Kronecker products, the trace
// pairing functional and real vectorization.

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcone {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Global positive-definiteness rule: lambda_min > kEpsPd * max(1, lambda_max).
inline constexpr double kEpsPd = 1e-12;
/// Relative asymmetry accepted on ingestion (scaled by the Frobenius norm).
inline constexpr double kHermTol = 1e-10;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense complex Hermitian matrix. Construction validates conjugate symmetry
/// and stores the symmetrized matrix (X + X^*)/2.
class HermMatrix {
 public:
  HermMatrix() = default;
  explicit HermMatrix(const CMat& m);
  static HermMatrix from_real(const RMat& m);
  static HermMatrix identity(int n);
  static HermMatrix zero(int n);
  static HermMatrix diagonal(std::span<const double> d);
  /// Symmetrizes without the tolerance check. For values that are Hermitian
  /// up to rounding by construction.
  static HermMatrix trusted(const CMat& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  double frobenius() const { return m_.norm(); }

  HermMatrix operator+(const HermMatrix& o) const;
  HermMatrix operator-(const HermMatrix& o) const;
  HermMatrix operator*(double s) const;
  HermMatrix& operator+=(const HermMatrix& o);

 private:
  CMat m_;
};

inline HermMatrix operator*(double s, const HermMatrix& h) { return h * s; }

struct SpectralDecomp {
  RVec eigenvalues;  // ascending
  CMat eigenvectors;  // unitary, columns

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  double lambda_min() const { return eigenvalues(0); }
  double lambda_max() const { return eigenvalues(eigenvalues.size() - 1); }
};

/// Scalar function together with its first two derivatives and open domain
/// (lower, +inf) or the whole real line.
struct ScalarFn {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  double domain_lower = -std::numeric_limits<double>::infinity();
  bool lower_open = true;
  std::string name;

  bool in_domain(double x) const {
    return lower_open ? x > domain_lower : x >= domain_lower;
  }
};

namespace fn {
ScalarFn identity();
ScalarFn square();
ScalarFn log();
ScalarFn sqrt();
ScalarFn power(double p);  // x^p on (0, inf)
ScalarFn xlogx();  // x log x on (0, inf)
}  // namespace fn

SpectralDecomp spectral(const HermMatrix& x);
/// Decomposes an internally computed matrix; symmetrizes without validation.
SpectralDecomp spectral_trusted(const CMat& x);

CMat reconstruct(const SpectralDecomp& s, const RVec& values);
HermMatrix apply_fn(const SpectralDecomp& s, const ScalarFn& g);
/// Entrywise U diag(values) U^* as a raw matrix.
CMat apply_values(const SpectralDecomp& s, const RVec& values);

/// First divided differences g[l_i, l_j] with the derivative on (near) ties.
RMat divided_diff1(const RVec& lambda, const ScalarFn& g);
/// Second divided difference g[a, b, c].
double divided_diff2(double a, double b, double c, const ScalarFn& g);

/// Derivative of X -> g(X) at the decomposed point in direction H.
HermMatrix frechet1(const SpectralDecomp& s, const ScalarFn& g, const HermMatrix& h);
CMat frechet1(const SpectralDecomp& s, const RMat& dd1, const CMat& h);
/// d/dt [ Dg(X + tH)[C] ] at t = 0, which is also the Hessian of
/// X -> tr(C g(X)) applied to H.
CMat frechet2(const SpectralDecomp& s, const ScalarFn& g, const CMat& c, const CMat& h);

HermMatrix kron(const HermMatrix& a, const HermMatrix& b);
CMat kron(const CMat& a, const CMat& b);
HermMatrix conj(const HermMatrix& a);

/// psi^* Z psi, psi the vectorized identity. Z must have dimension n^2.
double psi_apply(const HermMatrix& z);
double psi_apply(const CMat& z);

/// Real vectorization: n diagonal entries, then (sqrt2 Re, sqrt2 Im) of each
/// strict upper-triangle entry in column-major order.
RVec hvec(const HermMatrix& a);
RVec hvec(const CMat& a);
HermMatrix hmat(const RVec& v, int n);
void hvec_into(const CMat& a, Eigen::Ref<RVec> out);
CMat hmat_raw(const Eigen::Ref<const RVec>& v, int n);
/// Orthonormal (trace inner product) basis element k of the Hermitian n x n
/// matrices in hvec order.
CMat herm_basis(int n, int k);
inline int hvec_dim(int n) { return n * n; }

bool is_pd(const SpectralDecomp& s);
bool is_pd(const HermMatrix& x);
bool is_psd(const SpectralDecomp& s, double tol);

/// Frobenius-norm check that m is Hermitian within kHermTol.
bool is_hermitian(const CMat& m, double rel_tol = kHermTol);

/// Inverse, square root and inverse square root of a positive definite matrix.
struct PdFactors {
  SpectralDecomp spec;
  CMat inv;
  CMat sqrt;
  CMat inv_sqrt;
};
PdFactors pd_factors(const CMat& x);

/// Directional derivatives of -logdet at X in direction H, k in {0,1,2,3}.
/// k = 0 returns -logdet X.
double logdet_derivs(const HermMatrix& x, const HermMatrix& h, int k);

/// Solves H x = b for symmetric positive definite H after symmetric diagonal
/// equilibration. Falls back to pivoted LDL^T; returns false if both fail.
bool solve_spd(const RMat& h, const RMat& b, RMat& x);

/// Solves a general square system K x = b with symmetric Ruiz equilibration,
/// full-pivot LU and one step of iterative refinement. Returns false when the
/// equilibrated matrix is numerically singular.
bool solve_equilibrated(const RMat& k, const RVec& b, RVec& x);

inline double trace_product(const CMat& a, const CMat& b) {
  // tr(AB) for Hermitian A, B.
  return (a.array() * b.transpose().array()).sum().real();
}

inline CMat herm_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace qcone
