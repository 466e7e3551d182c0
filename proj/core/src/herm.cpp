#include "qcone/herm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qcone {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Relative gap below which eigenvalues are treated as tied in divided
// differences.
constexpr double kTieTol = 1e-7;

bool near_tie(double a, double b) {
  return std::abs(a - b) < kTieTol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

HermMatrix::HermMatrix(const CMat& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("HermMatrix: matrix is not square");
  }
  if (!is_hermitian(m)) {
    std::ostringstream os;
    os << "HermMatrix: asymmetry " << (m - m.adjoint()).norm() << " exceeds "
       << kHermTol << " * ||X||_F";
    throw DomainError(os.str());
  }
  m_ = herm_part(m);
}

HermMatrix HermMatrix::from_real(const RMat& m) { return HermMatrix(m.cast<Complex>()); }

HermMatrix HermMatrix::identity(int n) { return trusted(CMat::Identity(n, n)); }

HermMatrix HermMatrix::zero(int n) { return trusted(CMat::Zero(n, n)); }

HermMatrix HermMatrix::diagonal(std::span<const double> d) {
  CMat m = CMat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return trusted(m);
}

HermMatrix HermMatrix::trusted(const CMat& m) {
  HermMatrix h;
  h.m_ = herm_part(m);
  return h;
}

HermMatrix HermMatrix::operator+(const HermMatrix& o) const { return trusted(m_ + o.m_); }
HermMatrix HermMatrix::operator-(const HermMatrix& o) const { return trusted(m_ - o.m_); }
HermMatrix HermMatrix::operator*(double s) const { return trusted(s * m_); }
HermMatrix& HermMatrix::operator+=(const HermMatrix& o) {
  m_ += o.m_;
  return *this;
}

bool is_hermitian(const CMat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).norm() <= rel_tol * std::max(m.norm(), 1e-300) ||
         (m - m.adjoint()).norm() == 0.0;
}

namespace fn {

ScalarFn identity() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          -std::numeric_limits<double>::infinity(), true, "identity"};
}

ScalarFn square() {
  return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; },
          [](double) { return 2.0; }, -std::numeric_limits<double>::infinity(), true, "square"};
}

ScalarFn log() {
  return {[](double x) { return std::log(x); }, [](double x) { return 1.0 / x; },
          [](double x) { return -1.0 / (x * x); }, 0.0, true, "log"};
}

ScalarFn sqrt() {
  return {[](double x) { return std::sqrt(x); }, [](double x) { return 0.5 / std::sqrt(x); },
          [](double x) { return -0.25 / (x * std::sqrt(x)); }, 0.0, false, "sqrt"};
}

ScalarFn power(double p) {
  ScalarFn g{[p](double x) { return std::pow(x, p); },
             [p](double x) { return p * std::pow(x, p - 1.0); },
             [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); }, 0.0, true,
             "power"};
  return g;
}

ScalarFn xlogx() {
  return {[](double x) { return x * std::log(x); }, [](double x) { return std::log(x) + 1.0; },
          [](double x) { return 1.0 / x; }, 0.0, true, "xlogx"};
}

}  // namespace fn

SpectralDecomp spectral(const HermMatrix& x) { return spectral_trusted(x.mat()); }

SpectralDecomp spectral_trusted(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(herm_part(x));
  if (es.info() != Eigen::Success) {
    throw DomainError("spectral: eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

CMat apply_values(const SpectralDecomp& s, const RVec& values) {
  return s.eigenvectors * values.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
}

CMat reconstruct(const SpectralDecomp& s, const RVec& values) { return apply_values(s, values); }

namespace {

void check_domain(const RVec& lambda, const ScalarFn& g) {
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!g.in_domain(lambda(i))) {
      std::ostringstream os;
      os << "eigenvalue " << lambda(i) << " lies outside the domain of " << g.name;
      throw DomainError(os.str());
    }
  }
}

}  // namespace

HermMatrix apply_fn(const SpectralDecomp& s, const ScalarFn& g) {
  check_domain(s.eigenvalues, g);
  RVec v = s.eigenvalues.unaryExpr(g.f);
  return HermMatrix::trusted(apply_values(s, v));
}

RMat divided_diff1(const RVec& lambda, const ScalarFn& g) {
  check_domain(lambda, g);
  const Eigen::Index n = lambda.size();
  RMat dd(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double a = lambda(i);
      double b = lambda(j);
      double v;
      if (near_tie(a, b)) {
        v = 0.5 * (g.df(a) + g.df(b));
      } else {
        v = (g.f(a) - g.f(b)) / (a - b);
      }
      dd(i, j) = v;
      dd(j, i) = v;
    }
  }
  return dd;
}

namespace {

double dd1_pair(double a, double b, const ScalarFn& g) {
  if (near_tie(a, b)) return 0.5 * (g.df(a) + g.df(b));
  return (g.f(a) - g.f(b)) / (a - b);
}

}  // namespace

double divided_diff2(double a, double b, double c, const ScalarFn& g) {
  double v[3] = {a, b, c};
  std::sort(v, v + 3);
  if (near_tie(v[0], v[2])) {
    return 0.5 * g.d2f((v[0] + v[1] + v[2]) / 3.0);
  }
  return (dd1_pair(v[1], v[2], g) - dd1_pair(v[0], v[1], g)) / (v[2] - v[0]);
}

CMat frechet1(const SpectralDecomp& s, const RMat& dd1, const CMat& h) {
  CMat ht = s.eigenvectors.adjoint() * h * s.eigenvectors;
  CMat t = (dd1.cast<Complex>().array() * ht.array()).matrix();
  return s.eigenvectors * t * s.eigenvectors.adjoint();
}

HermMatrix frechet1(const SpectralDecomp& s, const ScalarFn& g, const HermMatrix& h) {
  if (h.dim() != s.dim()) throw ShapeError("frechet1: dimension mismatch");
  return HermMatrix::trusted(frechet1(s, divided_diff1(s.eigenvalues, g), h.mat()));
}

CMat frechet2(const SpectralDecomp& s, const ScalarFn& g, const CMat& c, const CMat& h) {
  check_domain(s.eigenvalues, g);
  const int n = s.dim();
  const CMat& u = s.eigenvectors;
  CMat ct = u.adjoint() * c * u;
  CMat ht = u.adjoint() * h * u;
  const RVec& l = s.eigenvalues;
  // dd2(i, k, j) flattened
  std::vector<double> dd2(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        dd2[(static_cast<std::size_t>(i) * n + k) * n + j] = divided_diff2(l(i), l(k), l(j), g);
  CMat t = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += dd2[(static_cast<std::size_t>(i) * n + k) * n + j] *
               (ht(i, k) * ct(k, j) + ct(i, k) * ht(k, j));
      }
      t(i, j) = acc;
    }
  }
  return u * t * u.adjoint();
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermMatrix kron(const HermMatrix& a, const HermMatrix& b) {
  return HermMatrix::trusted(kron(a.mat(), b.mat()));
}

HermMatrix conj(const HermMatrix& a) { return HermMatrix::trusted(a.mat().conjugate()); }

double psi_apply(const CMat& z) {
  const auto d = z.rows();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d))));
  if (n * n != d || z.cols() != d) {
    throw ShapeError("psi_apply: dimension " + std::to_string(d) + " is not a perfect square");
  }
  Complex acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) acc += z(i * n + i, j * n + j);
  return acc.real();
}

double psi_apply(const HermMatrix& z) { return psi_apply(z.mat()); }

void hvec_into(const CMat& a, Eigen::Ref<RVec> out) {
  const auto n = a.rows();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) out(k++) = a(i, i).real();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      // Average the two triangles so small asymmetries cancel.
      Complex v = 0.5 * (a(i, j) + std::conj(a(j, i)));
      out(k++) = kSqrt2 * v.real();
      out(k++) = kSqrt2 * v.imag();
    }
  }
}

RVec hvec(const CMat& a) {
  RVec v(a.rows() * a.rows());
  hvec_into(a, v);
  return v;
}

RVec hvec(const HermMatrix& a) { return hvec(a.mat()); }

CMat hmat_raw(const Eigen::Ref<const RVec>& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n) {
    throw ShapeError("hmat: vector length does not match n^2");
  }
  CMat a(n, n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) a(i, i) = v(k++);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      double re = v(k++) / kSqrt2;
      double im = v(k++) / kSqrt2;
      a(i, j) = Complex(re, im);
      a(j, i) = Complex(re, -im);
    }
  }
  return a;
}

HermMatrix hmat(const RVec& v, int n) { return HermMatrix::trusted(hmat_raw(v, n)); }

CMat herm_basis(int n, int k) {
  RVec e = RVec::Zero(static_cast<Eigen::Index>(n) * n);
  e(k) = 1.0;
  return hmat_raw(e, n);
}

bool is_pd(const SpectralDecomp& s) {
  return s.lambda_min() > kEpsPd * std::max(1.0, s.lambda_max());
}

bool is_pd(const HermMatrix& x) { return is_pd(spectral(x)); }

bool is_psd(const SpectralDecomp& s, double tol) {
  return s.lambda_min() >= -tol * std::max(1.0, std::abs(s.lambda_max()));
}

PdFactors pd_factors(const CMat& x) {
  PdFactors f;
  f.spec = spectral_trusted(x);
  if (!is_pd(f.spec)) {
    std::ostringstream os;
    os << "matrix is not positive definite (lambda_min = " << f.spec.lambda_min() << ")";
    throw DomainError(os.str());
  }
  const RVec& l = f.spec.eigenvalues;
  f.inv = apply_values(f.spec, l.cwiseInverse());
  f.sqrt = apply_values(f.spec, l.cwiseSqrt());
  f.inv_sqrt = apply_values(f.spec, l.cwiseSqrt().cwiseInverse());
  return f;
}

double logdet_derivs(const HermMatrix& x, const HermMatrix& h, int k) {
  if (x.dim() != h.dim()) throw ShapeError("logdet_derivs: dimension mismatch");
  if (k < 0 || k > 3) throw std::invalid_argument("logdet_derivs: order must be in {0,1,2,3}");
  PdFactors f = pd_factors(x.mat());
  if (k == 0) return -f.spec.eigenvalues.array().log().sum();
  CMat a = herm_part(f.inv_sqrt * h.mat() * f.inv_sqrt);
  switch (k) {
    case 1:
      return -a.trace().real();
    case 2:
      return a.squaredNorm();
    default:
      return -2.0 * (a * a * a).trace().real();
  }
}

bool solve_spd(const RMat& h, const RMat& b, RMat& x) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n || b.rows() != n) throw ShapeError("solve_spd: dimension mismatch");
  RVec d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = h(i, i);
    if (!(v > 0.0) || !std::isfinite(v)) return false;
    d(i) = 1.0 / std::sqrt(v);
  }
  const RMat hs = d.asDiagonal() * h * d.asDiagonal();
  const RMat bs = d.asDiagonal() * b;
  Eigen::LLT<RMat> llt(hs);
  if (llt.info() == Eigen::Success) {
    x = d.asDiagonal() * llt.solve(bs);
  } else {
    Eigen::LDLT<RMat> ldlt(hs);
    if (ldlt.info() != Eigen::Success) return false;
    x = d.asDiagonal() * ldlt.solve(bs);
  }
  return x.allFinite();
}

bool solve_equilibrated(const RMat& k, const RVec& b, RVec& x) {
  const Eigen::Index n = k.rows();
  if (k.cols() != n || b.size() != n) throw ShapeError("solve_equilibrated: dimension mismatch");
  RVec scale = RVec::Ones(n);
  RMat eq = k;
  for (int it = 0; it < 20; ++it) {
    RVec d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mx = eq.row(i).cwiseAbs().maxCoeff();
      d(i) = mx > 0.0 ? 1.0 / std::sqrt(mx) : 1.0;
    }
    eq = d.asDiagonal() * eq * d.asDiagonal();
    scale = scale.cwiseProduct(d);
    if ((d.array() - 1.0).abs().maxCoeff() < 1e-3) break;
  }
  Eigen::FullPivLU<RMat> lu(eq);
  if (!lu.isInvertible()) return false;
  x = scale.cwiseProduct(lu.solve(scale.cwiseProduct(b)));
  const RVec res = b - k * x;
  x += scale.cwiseProduct(lu.solve(scale.cwiseProduct(res)));
  return x.allFinite();
}

}  // namespace qcone
