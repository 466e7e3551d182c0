#pragma once

// Sampled certification of self-concordance, barrier parameter and
// compatibility inequalities, plus explicit barrier-parameter lower bounds.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qcone/barriers.hpp"

namespace qcone {

struct CertReport {
  std::string check;
  std::string subject;
  int samples = 0;
  int skipped = 0;
  std::uint64_t seed = 0;
  /// Largest observed statistic (ratio, g'H^{-1}g, or normalized margin).
  double worst = 0.0;
  /// Smallest observed statistic, where meaningful.
  double best = 0.0;
  double threshold = 0.0;
  bool pass = false;
  /// Witness for the worst sample.
  int worst_sample = -1;
  RVec witness_point;
  RVec witness_direction;
  std::string note;
};

/// Complex Gaussian PD sample A A^* + 1e-3 I.
CMat sample_pd(int n, std::mt19937_64& rng);
/// Gaussian Hermitian sample.
CMat sample_herm(int n, std::mt19937_64& rng);
/// Interior point with X, Y from sample_pd and a sampled PD slack.
ConePoint sample_interior(const ConeSpec& c, std::mt19937_64& rng);

/// max |D^3F[h]| / (2 (D^2F[h])^{3/2}); D^3 by a Richardson-extrapolated
/// central difference of Hessian quadratic forms.
CertReport check_sc(const ConeSpec& c, int samples, std::uint64_t seed, double tol = 1e-3,
                    double step = 1e-4);
/// Same inequality for -logdet on S^n_{++} using exact derivatives. With
/// rank_one set, directions are H = v v^*.
CertReport check_sc_logdet(int n, int samples, std::uint64_t seed, bool rank_one,
                           double tol = 1e-9);
/// Evaluates D^3 along h by differences of D^2 (exposed for tests).
double d3_fd(const ConeSpec& c, const RVec& x, const RVec& h, double step);

/// max g^T H^{-1} g against nu, plus the maximizer identity of
/// 2 Df[h] - D^2 f[h]. best holds the minimum over samples.
CertReport check_nu(const ConeSpec& c, int samples, std::uint64_t seed, double tol = 1e-6);
/// g^T H^{-1} g at a point.
double nu_at(const ConeSpec& c, const ConePoint& p);

struct CompatMargin {
  double margin = 0.0;
  double lambda_max_b = 0.0;
};
/// Normalized lambda_max(D^3 xi_s + 3 beta sqrt(d2f) D^2 xi_s) at one point
/// and lambda_max of ((1-s)X + sY)^{-1/2} ((1-s)H + sV) ((1-s)X + sY)^{-1/2}.
CompatMargin compat_margin(double s, const CMat& x, const CMat& y, const CMat& h, const CMat& v,
                           double d2f, double beta);

/// lambda_max(D^3 xi_s - 3 beta sqrt(D^2F) (-D^2 xi_s)) normalized by the
/// size of the terms, with F = -logdet X - logdet Y. Also asserts the
/// eta bound on lambda_max(B_s). tensor = true uses G_s with n1 = n2 = n.
CertReport check_compat(int n, int samples, std::uint64_t seed, const std::vector<double>& s_values,
                        bool tensor, double beta = 1.0, double tol = 1e-9);

/// D(X|Y) = -Psi(P_log(X (x) I, I (x) conj Y)) and
/// Q_alpha(X|Y) = Psi(X^alpha (x) conj(Y)^(1-alpha)).
CertReport check_tensor_identity(int n, int samples, std::uint64_t seed, double tol = 1e-10,
                                 double alpha = 0.5);

struct LBPremise {
  std::string name;
  bool ok;
};

struct LBCertificate {
  std::string cone;
  double eps = 0.0;
  int n_dirs = 0;
  int m = 0;
  std::vector<double> a, b, a_prime, b_prime;
  double tau_prime = 0.0;
  double tau = 0.0;
  /// sum a_i / b_i + sum a'_i / b'_i.
  double bound = 0.0;
  /// Bound at the finite tau used for verification.
  double bound_at_tau = 0.0;
  std::vector<LBPremise> premises;
  bool valid = false;
  std::string failed;
};

/// Diagonal-restriction certificate on the closed hypograph form of the cone.
LBCertificate lb_certificate(const ConeSpec& c, double eps);

}  // namespace qcone
