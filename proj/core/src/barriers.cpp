#include "qcone/barriers.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "qcone/divergence.hpp"
#include "qcone/perspective.hpp"

namespace qcone {

namespace {

std::string fmt_num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_num(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("bad numeric parameter '" + s + "' in cone kind '" + ctx + "'");
}

bool concave_alpha(double a) { return a >= 0.0 && a <= 1.0; }
bool convex_alpha(double a) { return (a >= -1.0 && a < 0.0) || (a > 1.0 && a <= 2.0); }

std::shared_ptr<const OpConcaveFn> shared_fn(const std::string& spec) {
  return std::make_shared<const OpConcaveFn>(catalog(spec));
}

double neg_logdet(const SpectralDecomp& s) { return -s.eigenvalues.array().log().sum(); }

CMat shift(const CMat& a, double eps) {
  return a + eps * CMat::Identity(a.rows(), a.cols());
}

double scale_of(const CMat& a) {
  return a.size() == 0 ? 0.0 : spectral_trusted(a).eigenvalues.cwiseAbs().maxCoeff();
}

// Orthogonal projector onto eigenvectors with eigenvalue above thr.
CMat range_projector(const CMat& a, double thr) {
  SpectralDecomp s = spectral_trusted(a);
  CMat p = CMat::Zero(a.rows(), a.cols());
  for (int i = 0; i < s.dim(); ++i) {
    if (s.eigenvalues(i) > thr) p += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
  }
  return p;
}

}  // namespace

int PositiveMap::out_dim(int n) const {
  switch (kind) {
    case MapKind::Trace:
      return 1;
    case MapKind::Identity:
      return n;
    default:
      return kraus.empty() ? 0 : static_cast<int>(kraus.front().cols());
  }
}

CMat PositiveMap::apply(const CMat& p) const {
  switch (kind) {
    case MapKind::Trace:
      return CMat::Constant(1, 1, p.trace().real());
    case MapKind::Identity:
      return p;
    default: {
      CMat out = CMat::Zero(kraus.front().cols(), kraus.front().cols());
      for (const auto& k : kraus) out += k.adjoint() * p * k;
      return herm_part(out);
    }
  }
}

CMat PositiveMap::adjoint(const CMat& w, int n) const {
  switch (kind) {
    case MapKind::Trace:
      return w(0, 0).real() * CMat::Identity(n, n);
    case MapKind::Identity:
      return w;
    default: {
      CMat out = CMat::Zero(n, n);
      for (const auto& k : kraus) out += k * w * k.adjoint();
      return herm_part(out);
    }
  }
}

void PositiveMap::validate(int n) const {
  if (kind != MapKind::Kraus) return;
  if (kraus.empty()) throw std::invalid_argument("Kraus map needs at least one operator");
  const auto m = kraus.front().cols();
  CMat acc = CMat::Zero(n, n);
  for (const auto& k : kraus) {
    if (k.rows() != n || k.cols() != m) {
      throw ShapeError("Kraus operators must all have size n x m");
    }
    acc += k * k.adjoint();
  }
  if (!is_pd(spectral_trusted(acc))) {
    throw std::invalid_argument("Kraus map: sum_i K_i K_i^* is not positive definite");
  }
}

int ConeSpec::z_dim() const {
  switch (kind) {
    case ConeKind::OpPerspHypo:
      return map.out_dim(n);
    default:
      return 1;
  }
}

double ConeSpec::sigma() const {
  switch (kind) {
    case ConeKind::EpiQRE:
    case ConeKind::EpiQalpha:
    case ConeKind::EpiDBS:
    case ConeKind::EpiQhat:
      return -1.0;
    default:
      return 1.0;
  }
}

bool ConeSpec::uses_quadrature() const {
  switch (kind) {
    case ConeKind::EpiDBS:
    case ConeKind::HypoQhat:
    case ConeKind::EpiQhat:
    case ConeKind::OpPerspHypo:
      return true;
    default:
      return false;
  }
}

std::string ConeSpec::to_string() const {
  switch (kind) {
    case ConeKind::EpiQRE:
      return "epi_qre";
    case ConeKind::HypoQalpha:
      return "hypo_qalpha:" + fmt_num(alpha);
    case ConeKind::EpiQalpha:
      return "epi_qalpha:" + fmt_num(alpha);
    case ConeKind::EpiDBS:
      return "epi_dbs";
    case ConeKind::HypoQhat:
      return "hypo_qhat:" + fmt_num(alpha);
    case ConeKind::EpiQhat:
      return "epi_qhat:" + fmt_num(alpha);
    case ConeKind::OpPerspHypo: {
      const char* m = map.kind == MapKind::Trace      ? "trace"
                      : map.kind == MapKind::Identity ? "identity"
                                                      : "kraus";
      return "op_persp_hypo:" + fn_spec + ":" + m;
    }
    default:
      return "trace_persp_hypo:" + fn_spec;
  }
}

ConeSpec make_cone(const std::string& kind, int n, const std::vector<CMat>& kraus) {
  if (n < 1) throw std::invalid_argument("cone dimension n must be positive");
  ConeSpec c;
  c.n = n;
  const auto colon = kind.find(':');
  const std::string head = kind.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : kind.substr(colon + 1);
  auto need_alpha = [&](bool concave) {
    if (rest.empty()) throw std::invalid_argument("cone kind '" + kind + "' needs :alpha");
    c.alpha = parse_num(rest, kind);
    if (concave && !concave_alpha(c.alpha)) {
      throw std::invalid_argument("cone kind '" + kind + "': alpha must lie in [0,1]");
    }
    if (!concave && !convex_alpha(c.alpha)) {
      throw std::invalid_argument("cone kind '" + kind + "': alpha must lie in [-1,0) or (1,2]");
    }
    c.fn_spec = "one_minus_alpha_pow:" + rest;
    c.g = shared_fn(c.fn_spec);
  };
  auto no_param = [&]() {
    if (!rest.empty()) throw std::invalid_argument("cone kind '" + head + "' takes no parameter");
  };
  if (head == "epi_qre") {
    no_param();
    c.kind = ConeKind::EpiQRE;
    c.fn_spec = "log";
    c.g = shared_fn("log");
  } else if (head == "hypo_qalpha") {
    c.kind = ConeKind::HypoQalpha;
    need_alpha(true);
  } else if (head == "epi_qalpha") {
    c.kind = ConeKind::EpiQalpha;
    need_alpha(false);
  } else if (head == "epi_dbs") {
    no_param();
    c.kind = ConeKind::EpiDBS;
    c.fn_spec = "log";
    c.g = shared_fn("log");
  } else if (head == "hypo_qhat") {
    c.kind = ConeKind::HypoQhat;
    need_alpha(true);
  } else if (head == "epi_qhat") {
    c.kind = ConeKind::EpiQhat;
    need_alpha(false);
  } else if (head == "op_persp_hypo") {
    c.kind = ConeKind::OpPerspHypo;
    const auto last = rest.rfind(':');
    if (last == std::string::npos) {
      throw std::invalid_argument("cone kind '" + kind + "' needs <fn>:<trace|identity|kraus>");
    }
    c.fn_spec = rest.substr(0, last);
    const std::string m = rest.substr(last + 1);
    if (m == "trace") {
      c.map.kind = MapKind::Trace;
    } else if (m == "identity") {
      c.map.kind = MapKind::Identity;
    } else if (m == "kraus") {
      c.map.kind = MapKind::Kraus;
      c.map.kraus = kraus;
    } else {
      throw std::invalid_argument("unknown positive map '" + m + "' in cone kind '" + kind + "'");
    }
    c.map.validate(n);
    c.g = shared_fn(c.fn_spec);
  } else if (head == "trace_persp_hypo") {
    if (rest.empty()) throw std::invalid_argument("cone kind '" + kind + "' needs :<fn>");
    c.kind = ConeKind::TracePerspHypo;
    c.fn_spec = rest;
    c.g = shared_fn(rest);
  } else {
    throw std::invalid_argument("unknown cone kind '" + kind + "'");
  }
  if (c.kind != ConeKind::OpPerspHypo && !kraus.empty()) {
    throw std::invalid_argument("Kraus operators given for cone kind '" + kind + "'");
  }
  return c;
}

void check_shape(const ConeSpec& c, const ConePoint& p) {
  if (p.X.dim() != c.x_dim() || p.Y.dim() != c.y_dim() || p.Z.dim() != c.z_dim()) {
    std::ostringstream os;
    os << "point shape (" << p.X.dim() << ", " << p.Y.dim() << ", " << p.Z.dim()
       << ") does not match cone " << c.to_string() << " (" << c.x_dim() << ", " << c.y_dim()
       << ", " << c.z_dim() << ")";
    throw ShapeError(os.str());
  }
}

RVec to_vec(const ConeSpec& c, const ConePoint& p) {
  check_shape(c, p);
  RVec v(c.dim());
  const int a = c.x_dim() * c.x_dim();
  const int b = c.y_dim() * c.y_dim();
  const int z = c.z_dim() * c.z_dim();
  hvec_into(p.X.mat(), v.segment(0, a));
  hvec_into(p.Y.mat(), v.segment(a, b));
  hvec_into(p.Z.mat(), v.segment(a + b, z));
  return v;
}

ConePoint from_vec(const ConeSpec& c, const Eigen::Ref<const RVec>& v) {
  if (v.size() != c.dim()) throw ShapeError("from_vec: vector length does not match cone");
  const int a = c.x_dim() * c.x_dim();
  const int b = c.y_dim() * c.y_dim();
  const int z = c.z_dim() * c.z_dim();
  return {HermMatrix::trusted(hmat_raw(v.segment(0, a), c.x_dim())),
          HermMatrix::trusted(hmat_raw(v.segment(a, b), c.y_dim())),
          HermMatrix::trusted(hmat_raw(v.segment(a + b, z), c.z_dim()))};
}

const char* to_string(InteriorStatus s) {
  switch (s) {
    case InteriorStatus::Interior:
      return "interior";
    case InteriorStatus::XNotPD:
      return "X is not positive definite";
    case InteriorStatus::YNotPD:
      return "Y is not positive definite";
    default:
      return "slack is not positive definite";
  }
}

namespace {

// h(X, Y) through the barrier's model.
CMat h_model(const ConeSpec& c, const CMat& x, const CMat& y) {
  const double sg = c.sigma();
  switch (c.kind) {
    case ConeKind::EpiQRE:
      return CMat::Constant(1, 1, sg * make_qre_form(x, y)->value());
    case ConeKind::HypoQalpha:
    case ConeKind::EpiQalpha:
      return CMat::Constant(1, 1, sg * make_qalpha_form(c.alpha, x, y)->value());
    case ConeKind::TracePerspHypo:
      return CMat::Constant(1, 1, make_trace_persp_form(*c.g, x, y)->value());
    default:
      return c.map.apply(PerspQuadModel(*c.g, x, y).value());
  }
}

}  // namespace

CMat h_exact(const ConeSpec& c, const CMat& x, const CMat& y) {
  if (!c.uses_quadrature()) return h_model(c, x, y);
  return c.map.apply(persp(*c.g, HermMatrix::trusted(x), HermMatrix::trusted(y)).mat());
}

CMat slack(const ConeSpec& c, const ConePoint& p) {
  check_shape(c, p);
  return herm_part(h_model(c, p.X.mat(), p.Y.mat()) - c.sigma() * p.Z.mat());
}

InteriorStatus interior_status(const ConeSpec& c, const ConePoint& p) {
  check_shape(c, p);
  if (!is_pd(spectral(p.X))) return InteriorStatus::XNotPD;
  if (!is_pd(spectral(p.Y))) return InteriorStatus::YNotPD;
  CMat s;
  try {
    s = slack(c, p);
  } catch (const DomainError&) {
    return InteriorStatus::SlackNotPD;
  }
  if (!s.allFinite() || !is_pd(spectral_trusted(s))) return InteriorStatus::SlackNotPD;
  return InteriorStatus::Interior;
}

bool interior(const ConeSpec& c, const ConePoint& p) {
  return interior_status(c, p) == InteriorStatus::Interior;
}

bool kernel_contained(const CMat& x, const CMat& y, double tol) {
  const double tx = tol * std::max(1.0, scale_of(x));
  const double ty = tol * std::max(1.0, scale_of(y));
  const CMat px = range_projector(x, tx);
  const CMat py = range_projector(y, ty);
  const CMat resid = (CMat::Identity(y.rows(), y.cols()) - py) * px;
  return resid.operatorNorm() <= 10.0 * tol;
}

double regularized_trace_persp(const OpConcaveFn& g, const CMat& x, const CMat& y,
                               double eps) {
  return persp(g, HermMatrix::trusted(shift(x, eps)), HermMatrix::trusted(shift(y, eps)))
      .trace();
}

bool closure_member(const ConeSpec& c, const ConePoint& p, double tol) {
  check_shape(c, p);
  auto psd = [tol](const CMat& a) {
    SpectralDecomp s = spectral_trusted(a);
    return s.lambda_min() >= -tol * std::max(1.0, std::abs(s.lambda_max()));
  };
  if (!psd(p.X.mat()) || !psd(p.Y.mat())) return false;
  const CMat xk = c.kind == ConeKind::TracePerspHypo
                      ? CMat(p.X(0, 0).real() * CMat::Identity(c.n, c.n))
                      : p.X.mat();
  const CMat& yk = p.Y.mat();
  switch (domain_case(*c.g)) {
    case DomainCase::I:
      break;
    case DomainCase::II:
      if (!kernel_contained(xk, yk, tol)) return false;
      break;
    case DomainCase::III:
      if (!kernel_contained(yk, xk, tol)) return false;
      break;
    case DomainCase::IV:
      if (!kernel_contained(xk, yk, tol) || !kernel_contained(yk, xk, tol)) return false;
      break;
  }
  const double scale = std::max({1.0, scale_of(p.X.mat()), scale_of(p.Y.mat())});
  const double eps = 1e-2 * tol * scale;
  CMat s;
  try {
    s = herm_part(h_exact(c, shift(p.X.mat(), eps), shift(p.Y.mat(), eps)) -
                  c.sigma() * p.Z.mat());
  } catch (const DomainError&) {
    return false;
  }
  if (!s.allFinite()) return false;
  SpectralDecomp ss = spectral_trusted(s);
  return ss.lambda_min() >= -10.0 * tol * std::max(1.0, std::abs(ss.lambda_max()));
}

ConePoint feasible_start(const ConeSpec& c) {
  const CMat ix = CMat::Identity(c.x_dim(), c.x_dim());
  const CMat iy = CMat::Identity(c.y_dim(), c.y_dim());
  const CMat iz = CMat::Identity(c.z_dim(), c.z_dim());
  const CMat h = h_model(c, ix, iy);
  return {HermMatrix::trusted(ix), HermMatrix::trusted(iy),
          HermMatrix::trusted(c.sigma() * (h - iz))};
}

struct BarrierOracle::Impl {
  ConeSpec c;
  CMat x, y, z;
  int na, nb, nz;
  double sg;
  PdFactors fx, fy;
  double val = 0.0;
  // Scalar slack u = sigma (zeta - z).
  std::unique_ptr<SplitForm> form;
  double u = 0.0;
  CMat gzx, gzy;
  // Matrix slack S = phi(P) - sigma Z.
  std::unique_ptr<PerspQuadModel> model;
  CMat sinv, w;

  void split(const RVec& h, CMat& hx, CMat& hy, CMat& hz) const {
    hx = hmat_raw(h.segment(0, na), c.x_dim());
    hy = hmat_raw(h.segment(na, nb), c.y_dim());
    hz = hmat_raw(h.segment(na + nb, nz), c.z_dim());
  }

  RVec join(const CMat& a, const CMat& b, const CMat& d) const {
    RVec v(na + nb + nz);
    hvec_into(a, v.segment(0, na));
    hvec_into(b, v.segment(na, nb));
    hvec_into(d, v.segment(na + nb, nz));
    return v;
  }
};

BarrierOracle::BarrierOracle(const ConeSpec& c, const ConePoint& p)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  const InteriorStatus st = interior_status(c, p);
  if (st != InteriorStatus::Interior) {
    throw NotInteriorError(st, std::string("barrier: point is not interior (") +
                                   qcone::to_string(st) + ")");
  }
  s.c = c;
  s.x = p.X.mat();
  s.y = p.Y.mat();
  s.z = p.Z.mat();
  s.na = c.x_dim() * c.x_dim();
  s.nb = c.y_dim() * c.y_dim();
  s.nz = c.z_dim() * c.z_dim();
  s.sg = c.sigma();
  s.fx = pd_factors(s.x);
  s.fy = pd_factors(s.y);
  s.val = neg_logdet(s.fx.spec) + neg_logdet(s.fy.spec);
  if (c.uses_quadrature()) {
    s.model = std::make_unique<PerspQuadModel>(*c.g, s.x, s.y);
    const CMat sl = herm_part(c.map.apply(s.model->value()) - s.sg * s.z);
    PdFactors fs = pd_factors(sl);
    s.sinv = fs.inv;
    s.w = c.map.adjoint(s.sinv, c.n);
    s.val += neg_logdet(fs.spec);
  } else {
    switch (c.kind) {
      case ConeKind::EpiQRE:
        s.form = make_qre_form(s.x, s.y);
        break;
      case ConeKind::TracePerspHypo:
        s.form = make_trace_persp_form(*c.g, s.x, s.y);
        break;
      default:
        s.form = make_qalpha_form(c.alpha, s.x, s.y);
        break;
    }
    s.u = s.sg * (s.form->value() - s.z(0, 0).real());
    if (!(s.u > 0.0)) throw NotInteriorError(InteriorStatus::SlackNotPD, "barrier: slack <= 0");
    s.form->grad(s.gzx, s.gzy);
    s.val -= std::log(s.u);
  }
}

BarrierOracle::~BarrierOracle() = default;
BarrierOracle::BarrierOracle(BarrierOracle&&) noexcept = default;
BarrierOracle& BarrierOracle::operator=(BarrierOracle&&) noexcept = default;

double BarrierOracle::value() const { return impl_->val; }

RVec BarrierOracle::grad() const {
  const Impl& s = *impl_;
  CMat gx = -s.fx.inv;
  CMat gy = -s.fy.inv;
  CMat gz;
  if (s.model) {
    CMat ax, ay;
    s.model->weighted_grad(s.w, ax, ay);
    gx -= ax;
    gy -= ay;
    gz = s.sg * s.sinv;
  } else {
    gx -= (s.sg / s.u) * s.gzx;
    gy -= (s.sg / s.u) * s.gzy;
    gz = CMat::Constant(1, 1, s.sg / s.u);
  }
  return s.join(gx, gy, gz);
}

namespace {

// Hessian-vector product; with_slack_sq = false drops the J J^T part.
RVec hessvec_impl(const BarrierOracle::Impl& s, const RVec& h, bool with_slack_sq) {
  if (h.size() != s.na + s.nb + s.nz) throw ShapeError("hessvec: direction length mismatch");
  CMat hx, hy, hz;
  s.split(h, hx, hy, hz);
  CMat ox = s.fx.inv * hx * s.fx.inv;
  CMat oy = s.fy.inv * hy * s.fy.inv;
  CMat oz = CMat::Zero(s.c.z_dim(), s.c.z_dim());
  if (s.model) {
    CMat bx, by;
    s.model->weighted_hessvec(s.w, hx, hy, bx, by);
    ox -= bx;
    oy -= by;
    if (with_slack_sq) {
      const CMat ds = s.c.map.apply(s.model->d1(hx, hy)) - s.sg * hz;
      const CMat t = herm_part(s.sinv * ds * s.sinv);
      CMat ax, ay;
      s.model->weighted_grad(s.c.map.adjoint(t, s.c.n), ax, ay);
      ox += ax;
      oy += ay;
      oz = -s.sg * t;
    }
  } else {
    CMat qx, qy;
    s.form->hessvec(hx, hy, qx, qy);
    ox -= (s.sg / s.u) * qx;
    oy -= (s.sg / s.u) * qy;
    if (with_slack_sq) {
      const double du =
          s.sg * (trace_product(s.gzx, hx) + trace_product(s.gzy, hy) - hz(0, 0).real());
      const double a = s.sg * du / (s.u * s.u);
      ox += a * s.gzx;
      oy += a * s.gzy;
      oz = CMat::Constant(1, 1, -a);
    }
  }
  return s.join(herm_part(ox), herm_part(oy), oz);
}

}  // namespace

RVec BarrierOracle::hessvec(const RVec& h) const { return hessvec_impl(*impl_, h, true); }

void BarrierOracle::hessian_factored(RMat& rest, RMat& jac) const {
  const Impl& s = *impl_;
  const int d = s.na + s.nb + s.nz;
  rest.resize(d, d);
  RVec e = RVec::Zero(d);
  for (int k = 0; k < d; ++k) {
    e(k) = 1.0;
    rest.col(k) = hessvec_impl(s, e, false);
    e(k) = 0.0;
  }
  rest = 0.5 * (rest + rest.transpose()).eval();
  if (s.model) {
    // Columns: adjoint of h -> hvec(S^{-1/2} DS[h] S^{-1/2}) on the basis.
    const int m = s.c.z_dim();
    const PdFactors fs = pd_factors(herm_part(s.sinv));
    const CMat& r = fs.sqrt;  // S^{-1/2}
    jac.resize(d, m * m);
    for (int k = 0; k < m * m; ++k) {
      const CMat t = herm_part(r * herm_basis(m, k) * r);
      CMat ax, ay;
      s.model->weighted_grad(s.c.map.adjoint(t, s.c.n), ax, ay);
      jac.col(k) = s.join(herm_part(ax), herm_part(ay), -s.sg * t);
    }
  } else {
    jac.resize(d, 1);
    jac.col(0) = (s.sg / s.u) * s.join(s.gzx, s.gzy, -CMat::Identity(1, 1));
  }
}

RMat BarrierOracle::hessian() const {
  const int d = impl_->na + impl_->nb + impl_->nz;
  RMat hm(d, d);
  RVec e = RVec::Zero(d);
  for (int k = 0; k < d; ++k) {
    e(k) = 1.0;
    hm.col(k) = hessvec(e);
    e(k) = 0.0;
  }
  return 0.5 * (hm + hm.transpose());
}

BarrierEval barrier_eval(const ConeSpec& c, const ConePoint& p, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("barrier_eval: order must be 0, 1 or 2");
  BarrierOracle o(c, p);
  BarrierEval e;
  e.value = o.value();
  if (order >= 1) e.grad = o.grad();
  if (order >= 2) e.hess = o.hessian();
  return e;
}

}  // namespace qcone
