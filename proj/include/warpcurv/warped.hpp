#pragma once

#include <Eigen/Dense>

#include <vector>

#include "warpcurv/construction.hpp"
#include "warpcurv/tensor.hpp"

namespace warpcurv {

/// Warped product (base, fiber, phi): the metric gbar + phi^2 eta on product
/// coordinates (x^1..x^m, x^(m+1)..x^n), phi > 0 on the base.
struct WarpedProductSpec {
  MetricChart base;    // dim m
  MetricChart fiber;   // dim p
  ScalarField warping; // phi on the base
  bool fiber_einstein = false;
  double kappa = 0.0;  // declared Einstein constant of the fiber (0 when p = 1)
};

/// Product chart with block structure g_ij = gbar_ij, g_ia = 0 (exact),
/// g_ab = phi^2 eta_ab. Analytic when every ingredient supplies derivatives.
MetricChart assemble_metric(const WarpedProductSpec& spec);

/// Closed-form Ricci tensor of the warped product at product point x.
Eigen::MatrixXd warped_ricci(const WarpedProductSpec& spec, const Eigen::VectorXd& x);

/// Closed-form covariant Ricci derivative; (la, mu, nu) = nabla_nu r_{la mu}.
/// The mixed families r_{ij,a} and r_{aj,i} vanish identically, bit-exactly.
Tensor3 warped_nabla_ricci(const WarpedProductSpec& spec, const Eigen::VectorXd& x);

/// Residuals of the pointwise conditions equivalent to harmonic curvature of
/// the warped product:
///  (a) fiber Einstein defect ||P - kappa eta||;
///  (b) Codazzi defect of rbar - p phi^{-1} Hess phi on the base;
///  (c) phi^3 div[phi^{-1} Hess phi] - [(p-1)L - kappa] dphi - (1-p) phi dL/2;
///  (e) phi^2 [rbar(grad phi, .) + d lap phi] - [(p-1)L - kappa] dphi
///      - (1 - p/2) phi dL,           with L = |grad phi|^2.
struct HarmonicConditionReport {
  double fiber_einstein_residual = 0.0;
  double base_codazzi_residual = 0.0;
  double divergence_residual = 0.0;
  double laplacian_residual = 0.0;
  double assembled_codazzi_defect = 0.0;
  double bochner_residual_max = 0.0;
  double kappa_used = 0.0;
  double tolerance = 0.0;
  bool fiber_einstein_ok = false;
  bool base_codazzi_ok = false;
  bool divergence_ok = false;
  bool laplacian_ok = false;
  bool assembled_ok = false;
};

HarmonicConditionReport check_harmonic_conditions(
    const WarpedProductSpec& spec, const std::vector<Eigen::VectorXd>& base_points,
    const std::vector<Eigen::VectorXd>& fiber_points, double tolerance = 1e-6);

/// The trajectory-generated chart viewed as a warped product with the last
/// fiber coordinate split off (p = 1, kappa = 0).
WarpedProductSpec construction_warped_view(const WarpChart& chart);

// Chart and field catalog (all analytic).

MetricChart flat_chart(int n);

/// Diagonal metric g_ii = exp(c_i + lin_i . x + x . quad_i x / 2).
struct DiagExpParams {
  Eigen::VectorXd c;                  // n
  std::vector<Eigen::VectorXd> lin;   // n vectors of length n
  std::vector<Eigen::MatrixXd> quad;  // n symmetric n x n matrices (may be empty)
};
MetricChart diag_exp_chart(const DiagExpParams& params);

/// Round unit 2-sphere in polar coordinates (u, v), valid away from the poles.
MetricChart sphere_polar_chart();

ScalarField constant_field(int dim, double value);
ScalarField affine_field(const Eigen::VectorXd& a, double c);
/// phi = exp(c + a . x + x . Q x / 2).
ScalarField exp_quadratic_field(const Eigen::VectorXd& a, const Eigen::MatrixXd& Q, double c);
/// One-dimensional phi(t) = amp * cos(freq t + shift) + offset.
ScalarField cosine_field(double amp, double freq, double shift, double offset);

}  // namespace warpcurv
