#pragma once

// Independent reference computations for tests. Everything here is built
// directly on Eigen and does not call into qcone's spectral code.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Complex = std::complex<double>;

inline CMat random_pd(int n, std::mt19937_64& rng, double shift = 0.1) {
  std::normal_distribution<double> nd;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  CMat x = a * a.adjoint() / static_cast<double>(n) + shift * CMat::Identity(n, n);
  return 0.5 * (x + x.adjoint());
}

inline CMat random_herm(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return 0.5 * (a + a.adjoint());
}

inline CMat random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  Eigen::HouseholderQR<CMat> qr(a);
  return qr.householderQ() * CMat::Identity(n, n);
}

/// f(A) for Hermitian A by eigendecomposition.
inline CMat mat_fn(const CMat& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (a + a.adjoint()));
  RVec v = es.eigenvalues();
  for (int i = 0; i < v.size(); ++i) v(i) = f(v(i));
  return es.eigenvectors() * v.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline CMat mat_log(const CMat& a) { return mat_fn(a, [](double x) { return std::log(x); }); }
inline CMat mat_pow(const CMat& a, double p) {
  return mat_fn(a, [p](double x) { return std::pow(x, p); });
}

/// X^{1/2} g(X^{-1/2} Y X^{-1/2}) X^{1/2}.
inline CMat perspective(const std::function<double(double)>& g, const CMat& x, const CMat& y) {
  const CMat xs = mat_pow(x, 0.5);
  const CMat xi = mat_pow(x, -0.5);
  return xs * mat_fn(xi * y * xi, g) * xs;
}

/// tr(X log X - X log Y).
inline double qre(const CMat& x, const CMat& y) {
  return (x * (mat_log(x) - mat_log(y))).trace().real();
}

/// tr(X^alpha Y^(1-alpha)).
inline double qalpha(double alpha, const CMat& x, const CMat& y) {
  return (mat_pow(x, alpha) * mat_pow(y, 1.0 - alpha)).trace().real();
}

inline double logdet(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().sum();
}

/// Five-point central difference of a scalar function of t.
inline double diff(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

inline CMat diff_mat(const std::function<CMat(double)>& f, double h) {
  return (-f(2 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2 * h)) / (12 * h);
}

}  // namespace oracle
