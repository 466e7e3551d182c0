#pragma once

// Cone catalog with logarithmically homogeneous barrier oracles, interior and
// closure membership tests.

#include <memory>
#include <string>
#include <vector>

#include "qcone/herm.hpp"
#include "qcone/opfun.hpp"

namespace qcone {

enum class ConeKind {
  EpiQRE,
  HypoQalpha,
  EpiQalpha,
  EpiDBS,
  HypoQhat,
  EpiQhat,
  OpPerspHypo,
  TracePerspHypo
};

enum class MapKind { Trace, Identity, Kraus };

/// Positive linear map S^n -> S^m. Kraus form: phi(X) = sum_i K_i^* X K_i
/// with K_i of size n x m.
struct PositiveMap {
  MapKind kind = MapKind::Trace;
  std::vector<CMat> kraus;

  int out_dim(int n) const;
  CMat apply(const CMat& p) const;
  CMat adjoint(const CMat& w, int n) const;
  /// Throws unless sum_i K_i K_i^* is positive definite.
  void validate(int n) const;
};

struct ConeSpec {
  ConeKind kind = ConeKind::EpiQRE;
  int n = 1;
  double alpha = 0.0;
  PositiveMap map;
  /// Perspective function (quadrature cones), f for the trace perspective,
  /// or the function whose perspective closure classifies the domain.
  std::shared_ptr<const OpConcaveFn> g;
  std::string fn_spec;

  int x_dim() const { return kind == ConeKind::TracePerspHypo ? 1 : n; }
  int y_dim() const { return n; }
  int z_dim() const;
  int nu() const { return x_dim() + y_dim() + z_dim(); }
  int dim() const { return x_dim() * x_dim() + y_dim() * y_dim() + z_dim() * z_dim(); }
  /// +1 for hypographs, -1 for epigraphs: slack = h(X, Y) - sigma Z.
  double sigma() const;
  bool uses_quadrature() const;
  std::string to_string() const;
};

/// Kind strings: "epi_qre", "hypo_qalpha:0.5", "epi_qalpha:1.5", "epi_dbs",
/// "hypo_qhat:0.5", "epi_qhat:2", "op_persp_hypo:<fn>:<trace|identity|kraus>",
/// "trace_persp_hypo:<fn>".
ConeSpec make_cone(const std::string& kind, int n, const std::vector<CMat>& kraus = {});

/// X, Y and slack variable Z. Scalar slacks and the trace perspective's x are
/// stored as 1 x 1 matrices.
struct ConePoint {
  HermMatrix X;
  HermMatrix Y;
  HermMatrix Z;
};

RVec to_vec(const ConeSpec& c, const ConePoint& p);
ConePoint from_vec(const ConeSpec& c, const Eigen::Ref<const RVec>& v);
void check_shape(const ConeSpec& c, const ConePoint& p);

enum class InteriorStatus { Interior, XNotPD, YNotPD, SlackNotPD };
const char* to_string(InteriorStatus s);

class NotInteriorError : public DomainError {
 public:
  NotInteriorError(InteriorStatus s, const std::string& what)
      : DomainError(what), status(s) {}
  InteriorStatus status;
};

/// Slack h(X, Y) - sigma Z with h evaluated through the barrier's own model.
CMat slack(const ConeSpec& c, const ConePoint& p);
/// h(X, Y) through the spectral route, valid on singular-free inputs where
/// the quadrature range may not hold.
CMat h_exact(const ConeSpec& c, const CMat& x, const CMat& y);

InteriorStatus interior_status(const ConeSpec& c, const ConePoint& p);
bool interior(const ConeSpec& c, const ConePoint& p);

/// Membership in the closed cone using the kernel condition of the
/// perspective's domain case and an epsilon-regularized slack test.
bool closure_member(const ConeSpec& c, const ConePoint& p, double tol = 1e-9);
/// ker(Y) within ker(X) up to tolerance.
bool kernel_contained(const CMat& x, const CMat& y, double tol);

/// tr P_g(X + eps I, Y + eps I) through the spectral route.
double regularized_trace_persp(const OpConcaveFn& g, const CMat& x, const CMat& y, double eps);

ConePoint feasible_start(const ConeSpec& c);

struct BarrierEval {
  double value = 0.0;
  RVec grad;
  RMat hess;
};

/// Barrier state at a strictly interior point.
class BarrierOracle {
 public:
  BarrierOracle(const ConeSpec& c, const ConePoint& p);
  ~BarrierOracle();
  BarrierOracle(BarrierOracle&&) noexcept;
  BarrierOracle& operator=(BarrierOracle&&) noexcept;

  double value() const;
  RVec grad() const;
  RVec hessvec(const RVec& h) const;
  RMat hessian() const;
  /// Hessian as rest + J J^T, where J J^T is the slack's Gauss-Newton term.
  /// The split keeps the dominant slack curvature out of the assembled sum.
  void hessian_factored(RMat& rest, RMat& jac) const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

/// order 0: value; 1: value and gradient; 2: also the Hessian.
BarrierEval barrier_eval(const ConeSpec& c, const ConePoint& p, int order);

}  // namespace qcone
