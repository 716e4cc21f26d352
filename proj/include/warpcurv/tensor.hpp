#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace warpcurv {

class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * n * n)) {}
  int dim() const { return n_; }
  double& operator()(int a, int b, int c) { return v_[(static_cast<Eigen::Index>(a) * n_ + b) * n_ + c]; }
  double operator()(int a, int b, int c) const { return v_[(static_cast<Eigen::Index>(a) * n_ + b) * n_ + c]; }
  double max_abs() const { return v_.size() == 0 ? 0.0 : v_.cwiseAbs().maxCoeff(); }
  Eigen::VectorXd& data() { return v_; }
  const Eigen::VectorXd& data() const { return v_; }

 private:
  int n_ = 0;
  Eigen::VectorXd v_;
};

class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n)
      : n_(n), v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * n * n * n)) {}
  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d) {
    return v_[((static_cast<Eigen::Index>(a) * n_ + b) * n_ + c) * n_ + d];
  }
  double operator()(int a, int b, int c, int d) const {
    return v_[((static_cast<Eigen::Index>(a) * n_ + b) * n_ + c) * n_ + d];
  }
  double max_abs() const { return v_.size() == 0 ? 0.0 : v_.cwiseAbs().maxCoeff(); }
  Eigen::VectorXd& data() { return v_; }
  const Eigen::VectorXd& data() const { return v_; }

 private:
  int n_ = 0;
  Eigen::VectorXd v_;
};

class Tensor5 {
 public:
  Tensor5() = default;
  explicit Tensor5(int n)
      : n_(n), v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n) * n * n * n * n)) {}
  int dim() const { return n_; }
  double& operator()(int a, int b, int c, int d, int e) {
    return v_[(((static_cast<Eigen::Index>(a) * n_ + b) * n_ + c) * n_ + d) * n_ + e];
  }
  double operator()(int a, int b, int c, int d, int e) const {
    return v_[(((static_cast<Eigen::Index>(a) * n_ + b) * n_ + c) * n_ + d) * n_ + e];
  }

 private:
  int n_ = 0;
  Eigen::VectorXd v_;
};

enum class DerivativeMode { Analytic, CentralDifference };

using MetricFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using MetricD1Fn = std::function<Tensor3(const Eigen::VectorXd&)>;  // (k; i, j) = d_k g_ij
using MetricD2Fn = std::function<Tensor4(const Eigen::VectorXd&)>;  // (k, l; i, j)

/// Coordinate-chart metric. In Analytic mode `dg` and `d2g` must be supplied;
/// in CentralDifference mode they are synthesized from `g` (first derivatives
/// with step eps^(1/3) * max(1, |x_k|) by default, higher ones with steps
/// tuned per order).
struct MetricChart {
  int n = 0;
  MetricFn g;
  MetricD1Fn dg;
  MetricD2Fn d2g;
  DerivativeMode mode = DerivativeMode::CentralDifference;
  double step = 0.0;  // base step override for CentralDifference; 0 = default
};

/// Scalar field on a chart. Missing derivative evaluators are synthesized by
/// central differences of the best available one.
struct ScalarField {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::function<Tensor3(const Eigen::VectorXd&)> third;
};

/// Pointwise derivative data of a chart, with everything the curvature
/// pipeline assembles from it. Index conventions:
///   gamma(nu, la, mu)        = Gamma^nu_{la mu}
///   dgamma(s, nu, la, mu)    = d_s Gamma^nu_{la mu}
///   riemann(la, mu, nu, ka)  fully covariant, ricci(mu, nu) = contraction
///   nabla_ricci(la, mu, nu)  = nabla_nu r_{la mu}
struct MetricJet {
  int n = 0;
  Eigen::MatrixXd g, ginv;
  Tensor3 dg;
  Tensor4 d2g;
  Tensor5 d3g;
  Tensor3 gamma;
  Tensor4 dgamma;
  Tensor5 d2gamma;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  Eigen::VectorXd dscalar;
  Tensor4 riemann;
  Tensor3 nabla_ricci;
};

MetricJet metric_jet(const MetricChart& chart, const Eigen::VectorXd& x);

struct CurvatureReport {
  Tensor3 christoffel;
  Eigen::MatrixXd ricci;
  double scalar = 0.0;
  Tensor4 weyl;
  Tensor3 nabla_ricci;
  Tensor4 riemann;
  double codazzi_defect_norm = 0.0;
  double div_ricci_minus_half_ds_norm = 0.0;
};

CurvatureReport curvature_at(const MetricChart& chart, const Eigen::VectorXd& x);

/// Max-norm of nabla_la r_{mu nu} - nabla_mu r_{la nu}; zero exactly when the
/// metric has harmonic curvature at x.
double codazzi_defect(const MetricChart& chart, const Eigen::VectorXd& x);

struct Curve {
  std::function<Eigen::VectorXd(double)> position;
  std::function<Eigen::VectorXd(double)> velocity;
  std::function<Eigen::VectorXd(double)> acceleration;
};

/// Sup norm of xddot^nu + Gamma^nu_{la mu} xdot^la xdot^mu.
double geodesic_residual(const MetricChart& chart, const Curve& curve, double t);

/// Sup norm of the 1-form r(grad phi, .) + d(lap phi) - div(hess phi);
/// an identity on any chart, so this is an engine self-test.
double bochner_residual(const MetricChart& chart, const ScalarField& phi,
                        const Eigen::VectorXd& x);
Eigen::VectorXd bochner_residual_form(const MetricChart& chart, const ScalarField& phi,
                                      const Eigen::VectorXd& x);

/// Derivative jet of a scalar field at x, synthesized where not supplied.
struct FieldJet {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // plain partials
  Tensor3 third;            // plain partials
};
FieldJet field_jet(const ScalarField& phi, const Eigen::VectorXd& x);

}  // namespace warpcurv
