#include "qcone/divergence.hpp"

namespace qcone {

namespace {

// Scalar function whose value is f' and derivative f'', for lifting f'.
ScalarFn derivative_fn(const ScalarFn& f) {
  ScalarFn d = f;
  d.f = f.df;
  d.df = f.d2f;
  d.d2f = [](double) { return 0.0; };
  d.name = f.name + "'";
  return d;
}

class QreForm final : public SplitForm {
 public:
  QreForm(const CMat& x, const CMat& y)
      : x_(x), lg_(fn::log()), sx_(spectral_trusted(x)), sy_(spectral_trusted(y)) {
    if (!is_pd(sx_)) throw DomainError("relative entropy: X is not positive definite");
    if (!is_pd(sy_)) throw DomainError("relative entropy: Y is not positive definite");
    logx_ = apply_values(sx_, sx_.eigenvalues.array().log().matrix());
    logy_ = apply_values(sy_, sy_.eigenvalues.array().log().matrix());
    ddx_ = divided_diff1(sx_.eigenvalues, lg_);
    ddy_ = divided_diff1(sy_.eigenvalues, lg_);
    const RVec& l = sx_.eigenvalues;
    value_ = (l.array() * l.array().log()).sum() - trace_product(x_, logy_);
  }

  double value() const override { return value_; }

  void grad(CMat& gx, CMat& gy) const override {
    gx = logx_ + CMat::Identity(x_.rows(), x_.cols()) - logy_;
    gy = -herm_part(frechet1(sy_, ddy_, x_));
  }

  void hessvec(const CMat& h, const CMat& v, CMat& hx, CMat& hy) const override {
    hx = herm_part(frechet1(sx_, ddx_, h) - frechet1(sy_, ddy_, v));
    hy = -herm_part(frechet1(sy_, ddy_, h) + frechet2(sy_, lg_, x_, v));
  }

 private:
  CMat x_;
  ScalarFn lg_;
  SpectralDecomp sx_, sy_;
  CMat logx_, logy_;
  RMat ddx_, ddy_;
  double value_;
};

class QalphaForm final : public SplitForm {
 public:
  QalphaForm(double alpha, const CMat& x, const CMat& y)
      : pa_(fn::power(alpha)),
        pb_(fn::power(1.0 - alpha)),
        sx_(spectral_trusted(x)),
        sy_(spectral_trusted(y)) {
    if (!is_pd(sx_)) throw DomainError("Q_alpha: X is not positive definite");
    if (!is_pd(sy_)) throw DomainError("Q_alpha: Y is not positive definite");
    xa_ = apply_values(sx_, sx_.eigenvalues.unaryExpr(pa_.f));
    yb_ = apply_values(sy_, sy_.eigenvalues.unaryExpr(pb_.f));
    ddx_ = divided_diff1(sx_.eigenvalues, pa_);
    ddy_ = divided_diff1(sy_.eigenvalues, pb_);
    value_ = trace_product(xa_, yb_);
  }

  double value() const override { return value_; }

  void grad(CMat& gx, CMat& gy) const override {
    gx = herm_part(frechet1(sx_, ddx_, yb_));
    gy = herm_part(frechet1(sy_, ddy_, xa_));
  }

  void hessvec(const CMat& h, const CMat& v, CMat& hx, CMat& hy) const override {
    hx = herm_part(frechet2(sx_, pa_, yb_, h) + frechet1(sx_, ddx_, frechet1(sy_, ddy_, v)));
    hy = herm_part(frechet2(sy_, pb_, xa_, v) + frechet1(sy_, ddy_, frechet1(sx_, ddx_, h)));
  }

 private:
  ScalarFn pa_, pb_;
  SpectralDecomp sx_, sy_;
  CMat xa_, yb_;
  RMat ddx_, ddy_;
  double value_;
};

class TracePerspForm final : public SplitForm {
 public:
  TracePerspForm(const OpConcaveFn& f, const CMat& x, const CMat& y)
      : f_(f.fn), fp_(derivative_fn(f.fn)), x_(x(0, 0).real()) {
    if (x.rows() != 1 || x.cols() != 1) throw ShapeError("trace perspective: x must be 1x1");
    if (!(x_ > 0.0)) throw DomainError("trace perspective: x is not positive");
    sr_ = spectral_trusted(y / x_);
    if (!is_pd(sr_)) throw DomainError("trace perspective: Y is not positive definite");
    const RVec& r = sr_.eigenvalues;
    const RVec fr = r.unaryExpr(f_.f);
    const RVec dfr = r.unaryExpr(f_.df);
    const RVec d2fr = r.unaryExpr(f_.d2f);
    value_ = x_ * fr.sum();
    gx_ = (fr.array() - r.array() * dfr.array()).sum();
    gy_ = apply_values(sr_, dfr);
    hxx_ = (r.array().square() * d2fr.array()).sum() / x_;
    hxy_ = apply_values(sr_, (-(r.array() * d2fr.array()) / x_).matrix());
    dd_ = divided_diff1(r, fp_);
  }

  double value() const override { return value_; }

  void grad(CMat& gx, CMat& gy) const override {
    gx = CMat::Constant(1, 1, gx_);
    gy = gy_;
  }

  void hessvec(const CMat& h, const CMat& v, CMat& hx, CMat& hy) const override {
    const double hs = h(0, 0).real();
    hx = CMat::Constant(1, 1, hxx_ * hs + trace_product(hxy_, v));
    hy = herm_part(hs * hxy_ + frechet1(sr_, dd_, v) / x_);
  }

 private:
  ScalarFn f_, fp_;
  double x_;
  SpectralDecomp sr_;
  double value_, gx_, hxx_;
  CMat gy_, hxy_;
  RMat dd_;
};

class TraceQuadForm final : public SplitForm {
 public:
  TraceQuadForm(const OpConcaveFn& g, double sign, const CMat& x, const CMat& y)
      : model_(g, x, y), sign_(sign), w_(sign * CMat::Identity(x.rows(), x.cols())) {}

  double value() const override { return sign_ * model_.value().trace().real(); }

  void grad(CMat& gx, CMat& gy) const override { model_.weighted_grad(w_, gx, gy); }

  void hessvec(const CMat& h, const CMat& v, CMat& hx, CMat& hy) const override {
    model_.weighted_hessvec(w_, h, v, hx, hy);
  }

 private:
  PerspQuadModel model_;
  double sign_;
  CMat w_;
};

}  // namespace

double SplitForm::deriv(const CMat& h, const CMat& v, int k) const {
  CMat a, b;
  if (k == 1) {
    grad(a, b);
  } else if (k == 2) {
    hessvec(h, v, a, b);
  } else {
    throw std::invalid_argument("SplitForm::deriv: order must be 1 or 2");
  }
  return trace_product(a, h) + trace_product(b, v);
}

std::unique_ptr<SplitForm> make_qre_form(const CMat& x, const CMat& y) {
  return std::make_unique<QreForm>(x, y);
}

std::unique_ptr<SplitForm> make_qalpha_form(double alpha, const CMat& x, const CMat& y) {
  return std::make_unique<QalphaForm>(alpha, x, y);
}

std::unique_ptr<SplitForm> make_trace_persp_form(const OpConcaveFn& f, const CMat& x,
                                                 const CMat& y) {
  return std::make_unique<TracePerspForm>(f, x, y);
}

std::unique_ptr<SplitForm> make_trace_quad_form(const OpConcaveFn& g, double sign, const CMat& x,
                                                const CMat& y) {
  return std::make_unique<TraceQuadForm>(g, sign, x, y);
}

double qre(const HermMatrix& x, const HermMatrix& y) {
  if (x.dim() != y.dim()) throw ShapeError("qre: dimension mismatch");
  return make_qre_form(x.mat(), y.mat())->value();
}

double qalpha(double alpha, const HermMatrix& x, const HermMatrix& y) {
  if (x.dim() != y.dim()) throw ShapeError("qalpha: dimension mismatch");
  return make_qalpha_form(alpha, x.mat(), y.mat())->value();
}

double dbs(const HermMatrix& x, const HermMatrix& y) {
  OpConcaveFn g;
  g.fn = fn::log();
  return -persp(g, x, y).trace();
}

double qhat(double alpha, const HermMatrix& x, const HermMatrix& y) {
  const double p = 1.0 - alpha;
  OpConcaveFn g;
  g.fn = fn::power(p);
  return persp(g, x, y).trace();
}

double trace_persp(const OpConcaveFn& f, double x, const HermMatrix& y) {
  if (!(x > 0.0)) throw DomainError("trace perspective: x is not positive");
  SpectralDecomp r = spectral_trusted(y.mat() / x);
  if (!is_pd(r)) throw DomainError("trace perspective: Y is not positive definite");
  return x * r.eigenvalues.unaryExpr(f.fn.f).sum();
}

}  // namespace qcone
