#include "qcone/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qcone/divergence.hpp"
#include "qcone/perspective.hpp"

namespace qcone {

namespace {

RVec gaussian_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  RVec v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

double quad_form(const BarrierOracle& o, const RVec& h) { return h.dot(o.hessvec(h)); }

double hess_form_at(const ConeSpec& c, const RVec& x, const RVec& h) {
  return quad_form(BarrierOracle(c, from_vec(c, x)), h);
}

CMat diag_mat(const RVec& v) {
  return v.cast<Complex>().asDiagonal();
}

}  // namespace

CMat sample_pd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return herm_part(a * a.adjoint()) + 1e-3 * CMat::Identity(n, n);
}

CMat sample_herm(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return herm_part(a);
}

ConePoint sample_interior(const ConeSpec& c, std::mt19937_64& rng) {
  const CMat x = sample_pd(c.x_dim(), rng);
  const CMat y = sample_pd(c.y_dim(), rng);
  const CMat s = sample_pd(c.z_dim(), rng);
  ConePoint p{HermMatrix::trusted(x), HermMatrix::trusted(y), HermMatrix::zero(c.z_dim())};
  const CMat h = slack(c, p);
  p.Z = HermMatrix::trusted(c.sigma() * (h - s));
  return p;
}

double d3_fd(const ConeSpec& c, const RVec& x, const RVec& h, double step) {
  auto central = [&](double d) {
    return (hess_form_at(c, x + d * h, h) - hess_form_at(c, x - d * h, h)) / (2.0 * d);
  };
  return (4.0 * central(0.5 * step) - central(step)) / 3.0;
}

CertReport check_sc(const ConeSpec& c, int samples, std::uint64_t seed, double tol,
                    double step) {
  CertReport r;
  r.check = "sc";
  r.subject = c.to_string() + " n=" + std::to_string(c.n);
  r.seed = seed;
  r.threshold = 1.0 + tol;
  r.best = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const ConePoint p = sample_interior(c, rng);
    const RVec x = to_vec(c, p);
    RVec h = gaussian_vec(c.dim(), rng);
    const double q0 = quad_form(BarrierOracle(c, p), h);
    if (!(q0 >= 1e-14)) {
      ++r.skipped;
      continue;
    }
    h /= std::sqrt(q0);
    const double ratio = std::abs(d3_fd(c, x, h, step)) / 2.0;
    ++r.samples;
    r.best = std::min(r.best, ratio);
    if (ratio > r.worst || r.worst_sample < 0) {
      r.worst = ratio;
      r.worst_sample = i;
      r.witness_point = x;
      r.witness_direction = h;
    }
  }
  r.pass = r.samples > 0 && r.worst <= r.threshold;
  return r;
}

CertReport check_sc_logdet(int n, int samples, std::uint64_t seed, bool rank_one, double tol) {
  CertReport r;
  r.check = rank_one ? "sc_logdet_rank1" : "sc_logdet";
  r.subject = "-logdet n=" + std::to_string(n);
  r.seed = seed;
  r.threshold = 1.0 + tol;
  r.best = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const HermMatrix x = HermMatrix::trusted(sample_pd(n, rng));
    CMat hm;
    if (rank_one) {
      std::normal_distribution<double> nd;
      Eigen::VectorXcd v(n);
      for (int k = 0; k < n; ++k) v(k) = Complex(nd(rng), nd(rng));
      hm = v * v.adjoint();
    } else {
      hm = sample_herm(n, rng);
    }
    const HermMatrix h = HermMatrix::trusted(hm);
    const double d2 = logdet_derivs(x, h, 2);
    if (!(d2 >= 1e-14)) {
      ++r.skipped;
      continue;
    }
    const double ratio = std::abs(logdet_derivs(x, h, 3)) / (2.0 * std::pow(d2, 1.5));
    ++r.samples;
    r.best = std::min(r.best, ratio);
    if (ratio > r.worst || r.worst_sample < 0) {
      r.worst = ratio;
      r.worst_sample = i;
      r.witness_point = hvec(x);
      r.witness_direction = hvec(h);
    }
  }
  r.pass = r.samples > 0 && r.worst <= r.threshold;
  return r;
}

namespace {

// Hessian held as R + J J^T; solves go through the bordered system
// [R J; J^T -I] so that a dominant slack term does not swamp R.
struct FactoredHessian {
  RMat rest;
  RMat jac;

  explicit FactoredHessian(const BarrierOracle& o) { o.hessian_factored(rest, jac); }

  RVec apply(const RVec& v) const { return rest * v + jac * (jac.transpose() * v); }

  bool solve(const RVec& b, RVec& x) const {
    const Eigen::Index d = rest.rows();
    const Eigen::Index r = jac.cols();
    RMat k = RMat::Zero(d + r, d + r);
    k.topLeftCorner(d, d) = rest;
    k.topRightCorner(d, r) = jac;
    k.bottomLeftCorner(r, d) = jac.transpose();
    k.bottomRightCorner(r, r) = -RMat::Identity(r, r);
    RVec rhs = RVec::Zero(d + r);
    rhs.head(d) = b;
    RVec sol;
    if (!solve_equilibrated(k, rhs, sol)) return false;
    x = sol.head(d);
    return true;
  }
};

// Condition number of D H D with D = diag(H)^{-1/2}.
double scaled_cond(const RMat& h) {
  const RVec d = h.diagonal().cwiseSqrt().cwiseInverse();
  Eigen::SelfAdjointEigenSolver<RMat> es(d.asDiagonal() * h * d.asDiagonal(),
                                         Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo > 0.0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

// Beyond 1 / unit roundoff the Hessian is singular in double precision.
constexpr double kUnresolvableCond = 1e16;

}  // namespace

double nu_at(const ConeSpec& c, const ConePoint& p) {
  BarrierOracle o(c, p);
  const RVec g = o.grad();
  RVec sol;
  if (!FactoredHessian(o).solve(g, sol)) throw DomainError("nu_at: Hessian is not invertible");
  return g.dot(sol);
}

CertReport check_nu(const ConeSpec& c, int samples, std::uint64_t seed, double tol) {
  CertReport r;
  r.check = "nu";
  r.subject = c.to_string() + " n=" + std::to_string(c.n);
  r.seed = seed;
  r.threshold = c.nu() + tol;
  r.best = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  int maximizer_failures = 0;
  for (int i = 0; r.samples < samples && i < 10 * samples; ++i) {
    const ConePoint p = sample_interior(c, rng);
    BarrierOracle o(c, p);
    const RVec g = o.grad();
    const FactoredHessian hm(o);
    RVec hstar;
    if (scaled_cond(o.hessian()) >= kUnresolvableCond || !hm.solve(g, hstar)) {
      ++r.skipped;
      continue;
    }
    const double val = g.dot(hstar);
    // q(h) = 2 g'h - h'Hh; increments are formed directly to avoid cancellation.
    const RVec resid = g - hm.apply(hstar);
    const double qstar = val + hstar.dot(resid);
    for (int k = 0; k < 3; ++k) {
      RVec d = gaussian_vec(c.dim(), rng);
      d *= 0.1 / std::sqrt(d.dot(hm.apply(d)));
      const double inc = 2.0 * resid.dot(d) - d.dot(hm.apply(d));
      if (inc > 0.0) ++maximizer_failures;
    }
    if (std::abs(qstar - val) > tol * (1.0 + val)) ++maximizer_failures;
    ++r.samples;
    r.best = std::min(r.best, val);
    if (val > r.worst || r.worst_sample < 0) {
      r.worst = val;
      r.worst_sample = i;
      r.witness_point = to_vec(c, p);
      r.witness_direction = hstar;
    }
  }
  if (maximizer_failures > 0) {
    r.note = std::to_string(maximizer_failures) + " maximizer-identity violations";
  }
  if (r.skipped > 0) {
    if (!r.note.empty()) r.note += "; ";
    r.note += std::to_string(r.skipped) + " numerically singular samples redrawn";
  }
  r.pass = r.samples > 0 && r.worst <= r.threshold && maximizer_failures == 0;
  return r;
}

CompatMargin compat_margin(double s, const CMat& x, const CMat& y, const CMat& h, const CMat& v,
                           double d2f, double beta) {
  CompatMargin out;
  const CMat d2 = xi_deriv_raw(s, 1.0 - s, x, y, h, v, 2);
  const CMat d3 = xi_deriv_raw(s, 1.0 - s, x, y, h, v, 3);
  const CMat m = herm_part(d3 + 3.0 * beta * std::sqrt(d2f) * d2);
  const double scale = std::max({1.0, d3.norm(), 3.0 * beta * std::sqrt(d2f) * d2.norm()});
  out.margin = spectral_trusted(m).lambda_max() / scale;
  PdFactors fs = pd_factors((1.0 - s) * x + s * y);
  const CMat bs = fs.inv_sqrt * ((1.0 - s) * h + s * v) * fs.inv_sqrt;
  out.lambda_max_b = spectral_trusted(bs).lambda_max();
  return out;
}

CertReport check_compat(int n, int samples, std::uint64_t seed, const std::vector<double>& s_values,
                        bool tensor, double beta, double tol) {
  CertReport r;
  r.check = tensor ? "compat_tensor" : "compat";
  r.subject = (tensor ? "G_s n1=n2=" : "xi_s n=") + std::to_string(n);
  r.seed = seed;
  r.threshold = tol;
  r.worst = -std::numeric_limits<double>::infinity();
  r.best = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  int eta_failures = 0;
  const CMat id = CMat::Identity(n, n);
  for (int i = 0; i < samples; ++i) {
    const CMat x = sample_pd(n, rng);
    const CMat y = sample_pd(n, rng);
    CMat h = sample_herm(n, rng);
    CMat v = sample_herm(n, rng);
    PdFactors fx = pd_factors(x);
    PdFactors fy = pd_factors(y);
    const double nx = (fx.inv_sqrt * h * fx.inv_sqrt).squaredNorm();
    const double ny = (fy.inv_sqrt * v * fy.inv_sqrt).squaredNorm();
    const double nf = std::sqrt(nx + ny);
    h /= nf;
    v /= nf;
    // After normalization both operator norms are at most 1.
    const double eta = 1.0;
    CMat xa = x, ya = y, ha = h, va = v;
    if (tensor) {
      xa = kron(x, id);
      ya = kron(id, y.conjugate());
      ha = kron(h, id);
      va = kron(id, v.conjugate());
    }
    for (double s : s_values) {
      const CompatMargin cm = compat_margin(s, xa, ya, ha, va, 1.0, beta);
      if (cm.lambda_max_b > eta * (1.0 + 1e-12) + 1e-12) ++eta_failures;
      ++r.samples;
      r.best = std::min(r.best, cm.margin);
      if (cm.margin > r.worst) {
        r.worst = cm.margin;
        r.worst_sample = i;
        RVec pv(2 * xa.rows() * xa.rows());
        pv << hvec(xa), hvec(ya);
        RVec dv(2 * xa.rows() * xa.rows());
        dv << hvec(ha), hvec(va);
        r.witness_point = pv;
        r.witness_direction = dv;
      }
    }
  }
  if (eta_failures > 0) r.note = std::to_string(eta_failures) + " eta-bound violations";
  r.pass = r.samples > 0 && r.worst <= tol && eta_failures == 0;
  return r;
}

CertReport check_tensor_identity(int n, int samples, std::uint64_t seed, double tol,
                                 double alpha) {
  CertReport r;
  r.check = "tensor";
  r.subject = "n=" + std::to_string(n) + " alpha=" + std::to_string(alpha);
  r.seed = seed;
  r.threshold = tol;
  std::mt19937_64 rng(seed);
  OpConcaveFn lg;
  lg.fn = fn::log();
  OpConcaveFn pw;
  pw.fn = fn::power(1.0 - alpha);
  const CMat id = CMat::Identity(n, n);
  for (int i = 0; i < samples; ++i) {
    const HermMatrix x = HermMatrix::trusted(sample_pd(n, rng));
    const HermMatrix y = HermMatrix::trusted(sample_pd(n, rng));
    const HermMatrix xt = HermMatrix::trusted(kron(x.mat(), id));
    const HermMatrix yt = HermMatrix::trusted(kron(id, y.mat().conjugate()));
    const double d = qre(x, y);
    const double d_persp = -psi_apply(persp(lg, xt, yt));
    const double d_closed = -psi_apply(tensor_log(x, y));
    const double q = qalpha(alpha, x, y);
    const double q_persp = psi_apply(persp(pw, xt, yt));
    const double q_closed = psi_apply(tensor_pow(alpha, x, y));
    const double err = std::max({std::abs(d - d_persp) / (1.0 + std::abs(d)),
                                 std::abs(d - d_closed) / (1.0 + std::abs(d)),
                                 std::abs(q - q_persp) / (1.0 + std::abs(q)),
                                 std::abs(q - q_closed) / (1.0 + std::abs(q))});
    ++r.samples;
    if (err > r.worst || r.worst_sample < 0) {
      r.worst = err;
      r.worst_sample = i;
      RVec pv(2 * n * n);
      pv << hvec(x), hvec(y);
      r.witness_point = pv;
    }
  }
  r.pass = r.samples > 0 && r.worst <= tol;
  return r;
}

LBCertificate lb_certificate(const ConeSpec& c, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lb_certificate: eps must lie in (0,1)");
  LBCertificate cert;
  cert.cone = c.to_string();
  cert.eps = eps;
  const int n1 = c.x_dim();
  const int n2 = c.y_dim();
  const int m = c.z_dim();
  const int nn = n1 + n2;
  cert.n_dirs = nn;
  cert.m = m;
  const double sg = c.sigma();
  auto premise = [&](const std::string& name, bool ok) {
    cert.premises.push_back({name, ok});
    if (!ok && cert.failed.empty()) cert.failed = name;
  };
  auto point = [&](const RVec& v, const CMat& ztilde) {
    return ConePoint{HermMatrix::trusted(diag_mat(v.head(n1))),
                     HermMatrix::trusted(diag_mat(v.tail(n2))),
                     HermMatrix::trusted(sg * ztilde)};
  };
  auto h_of = [&](const RVec& v) {
    return h_exact(c, diag_mat(v.head(n1)), diag_mat(v.tail(n2)));
  };

  std::vector<RVec> xs;
  RVec x0 = RVec::Zero(nn);
  for (int i = 0; i < nn; ++i) {
    RVec xi = RVec::Constant(nn, eps);
    xi(i) += 1.0 - eps;
    xs.push_back(xi);
    cert.a.push_back(1.0);
    x0 += xi;
  }
  const double bval = (nn - 1) * eps + 1.0;
  cert.b.assign(nn, bval);
  bool all_pos = true;
  bool outside = true;
  for (int i = 0; i < nn; ++i) {
    all_pos = all_pos && xs[i].minCoeff() > 0.0;
    outside = outside && (x0 - bval * xs[i]).minCoeff() <= 1e-12;
  }
  premise("x_i in K", all_pos);
  premise("x_0 = sum a_i x_i", (x0 - RVec::Constant(nn, bval)).cwiseAbs().maxCoeff() <= 1e-14 * nn);
  premise("x_0 - b_i x_i not in K", outside);

  const CMat iz = CMat::Identity(m, m);
  std::vector<CMat> zs;
  bool z_out = true;
  for (int i = 0; i < m; ++i) {
    CMat zi = CMat::Zero(m, m);
    zi(i, i) = 1.0;
    zs.push_back(zi);
    cert.a_prime.push_back(1.0);
    cert.b_prime.push_back(1.0);
    z_out = z_out && !is_pd(spectral_trusted(iz - zi));
  }
  premise("z_0 interior", is_pd(spectral_trusted(iz)));
  premise("z_0 - b'_i z_i not interior", z_out);

  const CMat hx0 = h_of(x0);
  CMat hsum = CMat::Zero(m, m);
  std::vector<CMat> hxs;
  for (const auto& xi : xs) {
    hxs.push_back(h_of(xi));
    hsum += hxs.back();
  }
  cert.tau_prime = std::max(0.0, spectral_trusted(herm_part(hx0 - hsum)).lambda_max());
  cert.tau = 2.0 * cert.tau_prime + 1.0;
  const double tau = cert.tau;

  premise("y_0 interior", interior(c, point(x0, hx0 - tau * iz)));
  bool rec = true;
  bool y_out = true;
  for (int i = 0; i < nn; ++i) {
    rec = rec && closure_member(c, point(xs[i], hxs[i]));
    y_out = y_out &&
            !interior(c, point(x0 - bval * xs[i], hx0 - tau * iz - bval * hxs[i]));
  }
  premise("p_i in closure", rec);
  premise("y_0 - b_i p_i not interior", y_out);
  bool rec_z = true;
  bool yz_out = true;
  const RVec zero = RVec::Zero(nn);
  for (int i = 0; i < m; ++i) {
    rec_z = rec_z && closure_member(c, point(zero, -tau * zs[i]));
    yz_out = yz_out && !interior(c, point(x0, hx0 - tau * (iz - zs[i])));
  }
  premise("p'_i in closure", rec_z);
  premise("y_0 - b'_i p'_i not interior", yz_out);
  premise("y_0 - sum c_i p_i - sum c'_i p'_i in closure",
          closure_member(c, point(zero, hx0 - hsum - cert.tau_prime * iz)));

  double s1 = 0.0;
  for (int i = 0; i < nn; ++i) s1 += cert.a[i] / cert.b[i];
  double s2 = 0.0;
  for (int i = 0; i < m; ++i) s2 += cert.a_prime[i] / cert.b_prime[i];
  cert.bound = s1 + s2;
  cert.bound_at_tau = s1 + (1.0 - cert.tau_prime / tau) * s2;
  cert.valid = cert.failed.empty();
  return cert;
}

}  // namespace qcone
