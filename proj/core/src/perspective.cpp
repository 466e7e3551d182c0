#include "qcone/perspective.hpp"

#include <sstream>

namespace qcone {

namespace {

void require_same_dim(const HermMatrix& a, const HermMatrix& b, const char* what) {
  if (a.dim() != b.dim()) throw ShapeError(std::string(what) + ": dimension mismatch");
}

CMat inverse_pd(const CMat& a) {
  Eigen::LLT<CMat> llt(a);
  if (llt.info() != Eigen::Success) throw DomainError("matrix is not positive definite");
  return herm_part(llt.solve(CMat::Identity(a.rows(), a.cols())));
}

}  // namespace

CMat xi_deriv_raw(double s, double sc, const CMat& x, const CMat& y, const CMat& h,
                  const CMat& v, int k) {
  const CMat ys = sc * x + s * y;
  const CMat m = inverse_pd(ys);
  const CMat delta = y - x;
  if (k == 0) return herm_part(-delta * m * delta);
  const CMat d = v - h;
  const CMat vs = sc * h + s * v;
  // R_j = (-M V_s)^j M
  std::vector<CMat> r(k + 1);
  r[0] = m;
  for (int j = 1; j <= k; ++j) r[j] = -(m * vs * r[j - 1]);
  CMat out = delta * r[k] * delta + d * r[k - 1] * delta + delta * r[k - 1] * d;
  if (k >= 2) out += d * r[k - 2] * d;
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  return herm_part(-fact * out);
}

HermMatrix xi(double s, const HermMatrix& x, const HermMatrix& y) {
  require_same_dim(x, y, "xi");
  const CMat z = CMat::Zero(x.dim(), x.dim());
  return HermMatrix::trusted(xi_deriv_raw(s, 1.0 - s, x.mat(), y.mat(), z, z, 0));
}

HermMatrix xi_deriv(double s, const HermMatrix& x, const HermMatrix& y, const HermMatrix& h,
                    const HermMatrix& v, int k) {
  require_same_dim(x, y, "xi_deriv");
  require_same_dim(x, h, "xi_deriv");
  require_same_dim(x, v, "xi_deriv");
  if (k < 1) throw std::invalid_argument("xi_deriv: order must be >= 1");
  return HermMatrix::trusted(xi_deriv_raw(s, 1.0 - s, x.mat(), y.mat(), h.mat(), v.mat(), k));
}

RVec ratio_spectrum(const HermMatrix& x, const HermMatrix& y) {
  require_same_dim(x, y, "ratio_spectrum");
  PdFactors fx = pd_factors(x.mat());
  return spectral_trusted(fx.inv_sqrt * y.mat() * fx.inv_sqrt).eigenvalues;
}

HermMatrix persp(const OpConcaveFn& g, const HermMatrix& x, const HermMatrix& y) {
  require_same_dim(x, y, "persp");
  PdFactors fx = pd_factors(x.mat());
  SpectralDecomp r = spectral_trusted(fx.inv_sqrt * y.mat() * fx.inv_sqrt);
  const CMat inner = apply_fn(r, g.fn).mat();
  return HermMatrix::trusted(fx.sqrt * inner * fx.sqrt);
}

HermMatrix persp_quad(const OpConcaveFn& g, const HermMatrix& x, const HermMatrix& y) {
  RVec r = ratio_spectrum(x, y);
  if (r(0) < kQuadRangeLo || r(r.size() - 1) > kQuadRangeHi) {
    std::ostringstream os;
    os << "ratio spectrum [" << r(0) << ", " << r(r.size() - 1)
       << "] lies outside the validated quadrature range [" << kQuadRangeLo << ", "
       << kQuadRangeHi << "]";
    throw QuadRangeError(os.str());
  }
  return HermMatrix::trusted(PerspQuadModel(g, x.mat(), y.mat()).value());
}

HermMatrix persp_deriv(const OpConcaveFn& g, const HermMatrix& x, const HermMatrix& y,
                       const HermMatrix& h, const HermMatrix& v, int k) {
  require_same_dim(x, y, "persp_deriv");
  require_same_dim(x, h, "persp_deriv");
  require_same_dim(x, v, "persp_deriv");
  if (k < 1 || k > 3) throw std::invalid_argument("persp_deriv: order must be in {1,2,3}");
  const auto& mu = g.measure;
  CMat acc = CMat::Zero(x.dim(), x.dim());
  for (int i = 0; i < mu.count(); ++i) {
    acc += mu.weights[i] *
           xi_deriv_raw(mu.nodes[i], mu.comp[i], x.mat(), y.mat(), h.mat(), v.mat(), k);
  }
  if (k == 1) acc += g.g1 * h.mat() + g.gp1 * (v.mat() - h.mat());
  return HermMatrix::trusted(acc);
}

PerspQuadModel::PerspQuadModel(const OpConcaveFn& g, const CMat& x, const CMat& y)
    : g1_(g.g1), gp1_(g.gp1), mu_(&g.measure), delta_(y - x) {
  const int nodes = mu_->count();
  m_.reserve(nodes);
  md_.reserve(nodes);
  value_ = g1_ * x + gp1_ * delta_;
  for (int k = 0; k < nodes; ++k) {
    m_.push_back(inverse_pd(mu_->comp[k] * x + mu_->nodes[k] * y));
    md_.push_back(m_.back() * delta_);
    value_ -= mu_->weights[k] * (delta_ * md_.back());
  }
  value_ = herm_part(value_);
}

CMat PerspQuadModel::d1(const CMat& h, const CMat& v) const {
  const CMat d = v - h;
  CMat acc = g1_ * h + gp1_ * d;
  for (int k = 0; k < mu_->count(); ++k) {
    const CMat vs = mu_->comp[k] * h + mu_->nodes[k] * v;
    const CMat t = md_[k].adjoint() * d;
    acc += mu_->weights[k] * (md_[k].adjoint() * vs * md_[k] - t - t.adjoint());
  }
  return herm_part(acc);
}

void PerspQuadModel::weighted_grad(const CMat& w, CMat& gx, CMat& gy) const {
  gx = (g1_ - gp1_) * w;
  gy = gp1_ * w;
  for (int k = 0; k < mu_->count(); ++k) {
    const CMat t = md_[k] * w;
    const CMat a1 = t + t.adjoint();
    const CMat b1 = -(t * md_[k].adjoint());
    const double wk = mu_->weights[k];
    gx += wk * (a1 - mu_->comp[k] * b1);
    gy -= wk * (a1 + mu_->nodes[k] * b1);
  }
  gx = herm_part(gx);
  gy = herm_part(gy);
}

void PerspQuadModel::weighted_hessvec(const CMat& w, const CMat& h, const CMat& v, CMat& hx,
                                      CMat& hy) const {
  const Eigen::Index n = w.rows();
  hx = CMat::Zero(n, n);
  hy = CMat::Zero(n, n);
  const CMat d2 = v - h;
  for (int k = 0; k < mu_->count(); ++k) {
    const CMat& m = m_[k];
    const CMat& md = md_[k];
    const CMat v2 = mu_->comp[k] * h + mu_->nodes[k] * v;
    const CMat mv2 = m * v2;
    const CMat ta = m * (d2 - v2 * md) * w;
    const CMat a = ta + ta.adjoint();
    const CMat t1 = md * w;
    const CMat kk = t1 * md.adjoint();
    const CMat tb1 = t1 * d2 * m;
    const CMat tb2 = mv2 * kk;
    const CMat b = tb2 + tb2.adjoint() - tb1 - tb1.adjoint();
    const double wk = mu_->weights[k];
    hx += wk * (a - mu_->comp[k] * b);
    hy -= wk * (a + mu_->nodes[k] * b);
  }
  hx = herm_part(hx);
  hy = herm_part(hy);
}

HermMatrix tensor_log(const HermMatrix& x, const HermMatrix& y) {
  SpectralDecomp sx = spectral(x);
  SpectralDecomp sy = spectral(y);
  const CMat xlogx = apply_fn(sx, fn::xlogx()).mat();
  const CMat logy = apply_fn(sy, fn::log()).mat();
  const CMat iy = CMat::Identity(y.dim(), y.dim());
  return HermMatrix::trusted(-kron(xlogx, iy) + kron(x.mat(), logy.conjugate()));
}

HermMatrix tensor_pow(double alpha, const HermMatrix& x, const HermMatrix& y) {
  const CMat xa = apply_fn(spectral(x), fn::power(alpha)).mat();
  const CMat yb = apply_fn(spectral(y), fn::power(1.0 - alpha)).mat();
  return HermMatrix::trusted(kron(xa, yb.conjugate()));
}

}  // namespace qcone
