#include "warpcurv/warped.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace warpcurv {

namespace {

struct BaseData {
  MetricJet jet;                       // base chart jet
  FieldJet phi;                        // plain partials of phi
  double value = 0.0;                  // phi
  Eigen::VectorXd theta_d;             // d theta = d phi / phi
  Eigen::MatrixXd hess_phi_cov;        // covariant Hessian of phi
  Eigen::MatrixXd hess_theta_cov;      // covariant Hessian of theta
  Tensor3 third_phi_cov;               // nabla_i (Hess phi)_{jk}
  std::vector<Eigen::MatrixXd> dginv;  // d_k of inverse metric
};

BaseData base_data(const WarpedProductSpec& spec, const Eigen::VectorXd& xb) {
  BaseData d;
  d.jet = metric_jet(spec.base, xb);
  d.phi = field_jet(spec.warping, xb);
  d.value = d.phi.value;
  if (!(d.value > 0.0)) throw std::domain_error("warped product: phi must be positive");
  const int m = spec.base.n;

  d.theta_d = d.phi.gradient / d.value;

  d.hess_phi_cov.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = d.phi.hessian(i, j);
      for (int s = 0; s < m; ++s) acc -= d.jet.gamma(s, i, j) * d.phi.gradient[s];
      d.hess_phi_cov(i, j) = acc;
    }
  d.hess_theta_cov = d.hess_phi_cov / d.value - d.theta_d * d.theta_d.transpose();

  d.third_phi_cov = Tensor3(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double dH = d.phi.third(i, j, k);
        for (int s = 0; s < m; ++s)
          dH -= d.jet.dgamma(i, s, j, k) * d.phi.gradient[s] +
                d.jet.gamma(s, j, k) * d.phi.hessian(s, i);
        double acc = dH;
        for (int s = 0; s < m; ++s)
          acc -= d.jet.gamma(s, i, j) * d.hess_phi_cov(s, k) +
                 d.jet.gamma(s, i, k) * d.hess_phi_cov(j, s);
        d.third_phi_cov(i, j, k) = acc;
      }

  d.dginv.resize(m);
  for (int k = 0; k < m; ++k) {
    Eigen::MatrixXd dgM(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) dgM(i, j) = d.jet.dg(k, i, j);
    d.dginv[k] = -d.jet.ginv * dgM * d.jet.ginv;
  }
  return d;
}

// Plain partial jets of psi = phi^p from those of phi.
struct PowerJet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  Tensor3 third;
};

PowerJet power_jet(const FieldJet& f, double p, int m) {
  PowerJet out;
  const double v = f.value;
  out.value = std::pow(v, p);
  const double c1 = p * std::pow(v, p - 1.0);
  const double c2 = p * (p - 1.0) * std::pow(v, p - 2.0);
  const double c3 = p * (p - 1.0) * (p - 2.0) * std::pow(v, p - 3.0);
  out.grad = c1 * f.gradient;
  out.hess = c2 * f.gradient * f.gradient.transpose() + c1 * f.hessian;
  out.third = Tensor3(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        out.third(i, j, k) = c3 * f.gradient[i] * f.gradient[j] * f.gradient[k] +
                             c2 * (f.hessian(i, j) * f.gradient[k] +
                                   f.hessian(i, k) * f.gradient[j] +
                                   f.hessian(j, k) * f.gradient[i]) +
                             c1 * f.third(i, j, k);
  return out;
}

// Covariant Laplacian of psi and its plain gradient.
struct LaplacianData {
  double lap = 0.0;
  Eigen::VectorXd dlap;
};

LaplacianData laplacian_of(const BaseData& b, const PowerJet& psi, int m) {
  LaplacianData out;
  Eigen::MatrixXd hcov(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = psi.hess(i, j);
      for (int s = 0; s < m; ++s) acc -= b.jet.gamma(s, i, j) * psi.grad[s];
      hcov(i, j) = acc;
    }
  out.lap = (b.jet.ginv * hcov).trace();
  out.dlap = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double dh = psi.third(k, i, j);
        for (int s = 0; s < m; ++s)
          dh -= b.jet.dgamma(k, s, i, j) * psi.grad[s] + b.jet.gamma(s, i, j) * psi.hess(s, k);
        acc += b.dginv[k](i, j) * hcov(i, j) + b.jet.ginv(i, j) * dh;
      }
    out.dlap[k] = acc;
  }
  return out;
}

struct FiberData {
  Eigen::MatrixXd eta;
  Eigen::MatrixXd ricci;        // P_ab
  Tensor3 nabla_ricci;          // D_c P_ab, stored (a, b, c)
};

FiberData fiber_data(const WarpedProductSpec& spec, const Eigen::VectorXd& xf) {
  FiberData d;
  const int p = spec.fiber.n;
  if (p == 1) {
    d.eta = spec.fiber.g(xf);
    d.ricci = Eigen::MatrixXd::Zero(1, 1);
    d.nabla_ricci = Tensor3(1);
    return d;
  }
  const MetricJet jet = metric_jet(spec.fiber, xf);
  d.eta = jet.g;
  d.ricci = jet.ricci;
  d.nabla_ricci = jet.nabla_ricci;
  return d;
}

void validate(const WarpedProductSpec& spec) {
  if (spec.base.n < 1 || spec.fiber.n < 1)
    throw std::invalid_argument("warped product: base and fiber must have dimension >= 1");
  if (spec.warping.dim != spec.base.n)
    throw std::invalid_argument("warped product: phi must live on the base");
}

}  // namespace

MetricChart assemble_metric(const WarpedProductSpec& spec) {
  validate(spec);
  const int m = spec.base.n;
  const int p = spec.fiber.n;
  const int n = m + p;
  const WarpedProductSpec s = spec;  // owned copy for the evaluators

  MetricChart chart;
  chart.n = n;
  chart.g = [s, m, p, n](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xb = x.head(m);
    const Eigen::VectorXd xf = x.tail(p);
    const double phi = s.warping.value(xb);
    if (!(phi > 0.0)) throw std::domain_error("warped product: phi must be positive");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    g.topLeftCorner(m, m) = s.base.g(xb);
    g.bottomRightCorner(p, p) = phi * phi * s.fiber.g(xf);
    return g;
  };

  const bool analytic = s.base.mode == DerivativeMode::Analytic && s.base.dg && s.base.d2g &&
                        s.fiber.mode == DerivativeMode::Analytic && s.fiber.dg && s.fiber.d2g &&
                        s.warping.gradient && s.warping.hessian;
  if (!analytic) {
    chart.mode = DerivativeMode::CentralDifference;
    return chart;
  }

  chart.mode = DerivativeMode::Analytic;
  chart.dg = [s, m, p, n](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xb = x.head(m);
    const Eigen::VectorXd xf = x.tail(p);
    const double phi = s.warping.value(xb);
    const Eigen::VectorXd dphi = s.warping.gradient(xb);
    const Eigen::MatrixXd eta = s.fiber.g(xf);
    const Tensor3 dgb = s.base.dg(xb);
    const Tensor3 deta = s.fiber.dg(xf);
    Tensor3 out(n);
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out(k, i, j) = dgb(k, i, j);
      const double w = 2.0 * phi * dphi[k];
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) out(k, m + a, m + b) = w * eta(a, b);
    }
    for (int c = 0; c < p; ++c)
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) out(m + c, m + a, m + b) = phi * phi * deta(c, a, b);
    return out;
  };
  chart.d2g = [s, m, p, n](const Eigen::VectorXd& x) {
    const Eigen::VectorXd xb = x.head(m);
    const Eigen::VectorXd xf = x.tail(p);
    const double phi = s.warping.value(xb);
    const Eigen::VectorXd dphi = s.warping.gradient(xb);
    const Eigen::MatrixXd d2phi = s.warping.hessian(xb);
    const Eigen::MatrixXd eta = s.fiber.g(xf);
    const Tensor3 deta = s.fiber.dg(xf);
    const Tensor4 d2gb = s.base.d2g(xb);
    const Tensor4 d2eta = s.fiber.d2g(xf);
    Tensor4 out(n);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) out(k, l, i, j) = d2gb(k, l, i, j);
        const double w = 2.0 * (dphi[k] * dphi[l] + phi * d2phi(k, l));
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) out(k, l, m + a, m + b) = w * eta(a, b);
      }
    for (int k = 0; k < m; ++k)
      for (int c = 0; c < p; ++c) {
        const double w = 2.0 * phi * dphi[k];
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) {
            out(k, m + c, m + a, m + b) = w * deta(c, a, b);
            out(m + c, k, m + a, m + b) = w * deta(c, a, b);
          }
      }
    for (int c = 0; c < p; ++c)
      for (int e = 0; e < p; ++e)
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b)
            out(m + c, m + e, m + a, m + b) = phi * phi * d2eta(c, e, a, b);
    return out;
  };
  return chart;
}

Eigen::MatrixXd warped_ricci(const WarpedProductSpec& spec, const Eigen::VectorXd& x) {
  validate(spec);
  const int m = spec.base.n;
  const int p = spec.fiber.n;
  const int n = m + p;
  if (x.size() != n) throw std::invalid_argument("warped_ricci: point dimension mismatch");

  const BaseData b = base_data(spec, x.head(m));
  const FiberData f = fiber_data(spec, x.tail(p));
  const PowerJet psi = power_jet(b.phi, static_cast<double>(p), m);
  const LaplacianData lap = laplacian_of(b, psi, m);

  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ric(i, j) = b.jet.ricci(i, j) -
                  p * (b.hess_theta_cov(i, j) + b.theta_d[i] * b.theta_d[j]);
  const double fiber_coef = std::pow(b.value, 2.0 - p) * lap.lap / p;
  for (int a = 0; a < p; ++a)
    for (int c = 0; c < p; ++c) ric(m + a, m + c) = f.ricci(a, c) - fiber_coef * f.eta(a, c);
  return ric;
}

Tensor3 warped_nabla_ricci(const WarpedProductSpec& spec, const Eigen::VectorXd& x) {
  validate(spec);
  const int m = spec.base.n;
  const int p = spec.fiber.n;
  const int n = m + p;
  if (x.size() != n) throw std::invalid_argument("warped_nabla_ricci: point dimension mismatch");

  const BaseData b = base_data(spec, x.head(m));
  const FiberData f = fiber_data(spec, x.tail(p));
  const PowerJet psi = power_jet(b.phi, static_cast<double>(p), m);
  const LaplacianData lap = laplacian_of(b, psi, m);

  const double phi = b.value;
  const double phi2 = phi * phi;
  const double u = std::pow(phi, -static_cast<double>(p)) * lap.lap;
  Eigen::VectorXd du(m);
  for (int i = 0; i < m; ++i)
    du[i] = -p * std::pow(phi, -static_cast<double>(p) - 1.0) * b.phi.gradient[i] * lap.lap +
            std::pow(phi, -static_cast<double>(p)) * lap.dlap[i];

  // nabla_i nabla_j theta + theta_i theta_j appears repeatedly; it equals the
  // base block correction of the warped Ricci tensor.
  Eigen::MatrixXd theta_block(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      theta_block(i, j) = b.hess_theta_cov(i, j) + b.theta_d[i] * b.theta_d[j];

  const Eigen::VectorXd theta_up = b.jet.ginv * b.theta_d;

  Tensor3 nr(n);
  // Base family: nabla_i of the base block.
  Tensor3 third_theta_cov(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        // nabla_i (Hess theta)_{jk} from the phi quantities:
        // Hess theta = Hess phi / phi - dtheta x dtheta.
        const double t1 = b.third_phi_cov(i, j, k) / phi -
                          b.theta_d[i] * b.hess_phi_cov(j, k) / phi;
        const double t2 = b.hess_theta_cov(i, j) * b.theta_d[k] +
                          b.theta_d[j] * b.hess_theta_cov(i, k);
        third_theta_cov(i, j, k) = t1 - t2;
      }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i) {
        const double grad_sq = b.hess_theta_cov(i, j) * b.theta_d[k] +
                               b.theta_d[j] * b.hess_theta_cov(i, k);
        nr(j, k, i) = b.jet.nabla_ricci(j, k, i) -
                      p * (third_theta_cov(i, j, k) + grad_sq);
      }

  // Mixed families with one base and two fiber labels.
  Eigen::MatrixXd mixed_coef(m, 1);
  for (int i = 0; i < m; ++i) {
    double acc = u / p * b.theta_d[i];
    for (int j = 0; j < m; ++j) {
      const double mtheta = b.jet.ricci(i, j) - p * theta_block(i, j);
      acc += mtheta * theta_up[j];
    }
    mixed_coef(i, 0) = phi2 * acc;
  }
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < p; ++a)
      for (int c = 0; c < p; ++c) {
        const double v = mixed_coef(i, 0) * f.eta(a, c) - b.theta_d[i] * f.ricci(a, c);
        nr(i, m + a, m + c) = v;  // nabla_c r_{i a}
        nr(m + a, i, m + c) = v;
      }

  // Fiber block differentiated along the base.
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < p; ++a)
      for (int c = 0; c < p; ++c)
        nr(m + a, m + c, i) =
            -phi2 * du[i] * f.eta(a, c) / p - 2.0 * b.theta_d[i] * f.ricci(a, c);

  // Fiber block differentiated along the fiber.
  for (int a = 0; a < p; ++a)
    for (int c = 0; c < p; ++c)
      for (int e = 0; e < p; ++e) nr(m + a, m + c, m + e) = f.nabla_ricci(a, c, e);

  return nr;
}

HarmonicConditionReport check_harmonic_conditions(
    const WarpedProductSpec& spec, const std::vector<Eigen::VectorXd>& base_points,
    const std::vector<Eigen::VectorXd>& fiber_points, double tolerance) {
  validate(spec);
  if (base_points.empty() || fiber_points.empty())
    throw std::invalid_argument("check_harmonic_conditions: need sample points");
  const int m = spec.base.n;
  const int p = spec.fiber.n;

  HarmonicConditionReport rep;
  rep.tolerance = tolerance;

  if (p == 1) {
    rep.kappa_used = 0.0;
  } else if (spec.fiber_einstein) {
    rep.kappa_used = spec.kappa;
  } else {
    const FiberData f = fiber_data(spec, fiber_points.front());
    rep.kappa_used = (f.eta.inverse() * f.ricci).trace() / p;
  }
  const double kappa = rep.kappa_used;

  for (const auto& xf : fiber_points) {
    const FiberData f = fiber_data(spec, xf);
    rep.fiber_einstein_residual =
        std::max(rep.fiber_einstein_residual,
                 (f.ricci - kappa * f.eta).cwiseAbs().maxCoeff());
  }

  for (const auto& xb : base_points) {
    const BaseData b = base_data(spec, xb);
    const double phi = b.value;

    // T = phi^{-1} Hess phi and its covariant derivative.
    Tensor3 dT(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          dT(i, j, k) = -b.phi.gradient[i] / (phi * phi) * b.hess_phi_cov(j, k) +
                        b.third_phi_cov(i, j, k) / phi;

    double codazzi = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const double lhs = b.jet.nabla_ricci(j, k, i) - p * dT(i, j, k);
          const double rhs = b.jet.nabla_ricci(i, k, j) - p * dT(j, i, k);
          codazzi = std::max(codazzi, std::abs(lhs - rhs));
        }
    rep.base_codazzi_residual = std::max(rep.base_codazzi_residual, codazzi);

    const double lambda = (b.jet.ginv * (b.phi.gradient * b.phi.gradient.transpose())).trace();
    Eigen::VectorXd dlambda = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          acc += b.dginv[k](i, j) * b.phi.gradient[i] * b.phi.gradient[j] +
                 2.0 * b.jet.ginv(i, j) * b.phi.hessian(i, k) * b.phi.gradient[j];
      dlambda[k] = acc;
    }

    const double pref = (p - 1.0) * lambda - kappa;

    double res_c = 0.0;
    for (int k = 0; k < m; ++k) {
      double div_t = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) div_t += b.jet.ginv(i, j) * dT(i, j, k);
      const double v = phi * phi * phi * div_t - pref * b.phi.gradient[k] -
                       (1.0 - p) * phi * dlambda[k] / 2.0;
      res_c = std::max(res_c, std::abs(v));
    }
    rep.divergence_residual = std::max(rep.divergence_residual, res_c);

    // d of the covariant Laplacian of phi.
    Eigen::VectorXd dlap = Eigen::VectorXd::Zero(m);
    double lap_phi = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) lap_phi += b.jet.ginv(i, j) * b.hess_phi_cov(i, j);
    for (int k = 0; k < m; ++k) {
      double acc = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double dh = b.phi.third(k, i, j);
          for (int s = 0; s < m; ++s)
            dh -= b.jet.dgamma(k, s, i, j) * b.phi.gradient[s] +
                  b.jet.gamma(s, i, j) * b.phi.hessian(s, k);
          acc += b.dginv[k](i, j) * b.hess_phi_cov(i, j) + b.jet.ginv(i, j) * dh;
        }
      dlap[k] = acc;
    }
    (void)lap_phi;

    const Eigen::VectorXd grad_up = b.jet.ginv * b.phi.gradient;
    double res_e = 0.0;
    for (int k = 0; k < m; ++k) {
      double ric_term = 0.0;
      for (int j = 0; j < m; ++j) ric_term += b.jet.ricci(k, j) * grad_up[j];
      const double v = phi * phi * (ric_term + dlap[k]) - pref * b.phi.gradient[k] -
                       (1.0 - p / 2.0) * phi * dlambda[k];
      res_e = std::max(res_e, std::abs(v));
    }
    rep.laplacian_residual = std::max(rep.laplacian_residual, res_e);

    rep.bochner_residual_max =
        std::max(rep.bochner_residual_max, bochner_residual(spec.base, spec.warping, xb));
  }

  const MetricChart assembled = assemble_metric(spec);
  std::size_t pairs = 0;
  for (std::size_t ib = 0; ib < base_points.size() && pairs < 12; ++ib)
    for (std::size_t jf = 0; jf < fiber_points.size() && pairs < 12; ++jf, ++pairs) {
      Eigen::VectorXd x(m + p);
      x << base_points[ib], fiber_points[jf];
      rep.assembled_codazzi_defect =
          std::max(rep.assembled_codazzi_defect, codazzi_defect(assembled, x));
    }

  rep.fiber_einstein_ok = rep.fiber_einstein_residual <= tolerance;
  rep.base_codazzi_ok = rep.base_codazzi_residual <= tolerance;
  rep.divergence_ok = rep.divergence_residual <= tolerance;
  rep.laplacian_ok = rep.laplacian_residual <= tolerance;
  rep.assembled_ok = rep.assembled_codazzi_defect <= tolerance;
  return rep;
}

WarpedProductSpec construction_warped_view(const WarpChart& chart) {
  const int fibers = chart.fibers();
  WarpedProductSpec spec;
  spec.base = chart.base_slice_chart(fibers - 1);
  spec.fiber = flat_chart(1);
  spec.warping = chart.warp_sqrt_field(fibers - 1, fibers);
  spec.fiber_einstein = true;
  spec.kappa = 0.0;
  return spec;
}

MetricChart flat_chart(int n) {
  if (n < 1) throw std::invalid_argument("flat_chart: n >= 1");
  MetricChart chart;
  chart.n = n;
  chart.mode = DerivativeMode::Analytic;
  chart.g = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n); };
  chart.dg = [n](const Eigen::VectorXd&) { return Tensor3(n); };
  chart.d2g = [n](const Eigen::VectorXd&) { return Tensor4(n); };
  return chart;
}

MetricChart diag_exp_chart(const DiagExpParams& params) {
  const int n = static_cast<int>(params.c.size());
  if (n < 1 || static_cast<int>(params.lin.size()) != n)
    throw std::invalid_argument("diag_exp_chart: inconsistent parameters");
  if (!params.quad.empty() && static_cast<int>(params.quad.size()) != n)
    throw std::invalid_argument("diag_exp_chart: quad must be empty or have n entries");
  const DiagExpParams ps = params;

  const auto exponent_grad = [ps, n](int i, const Eigen::VectorXd& x) {
    Eigen::VectorXd g = ps.lin[i];
    if (!ps.quad.empty()) g += ps.quad[i] * x;
    return g;
  };
  const auto gii = [ps, n, exponent_grad](int i, const Eigen::VectorXd& x) {
    double q = ps.c[i] + ps.lin[i].dot(x);
    if (!ps.quad.empty()) q += 0.5 * x.dot(ps.quad[i] * x);
    return std::exp(q);
  };

  MetricChart chart;
  chart.n = n;
  chart.mode = DerivativeMode::Analytic;
  chart.g = [n, gii](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = gii(i, x);
    return g;
  };
  chart.dg = [n, gii, exponent_grad](const Eigen::VectorXd& x) {
    Tensor3 out(n);
    for (int i = 0; i < n; ++i) {
      const double v = gii(i, x);
      const Eigen::VectorXd L = exponent_grad(i, x);
      for (int k = 0; k < n; ++k) out(k, i, i) = v * L[k];
    }
    return out;
  };
  chart.d2g = [ps, n, gii, exponent_grad](const Eigen::VectorXd& x) {
    Tensor4 out(n);
    for (int i = 0; i < n; ++i) {
      const double v = gii(i, x);
      const Eigen::VectorXd L = exponent_grad(i, x);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double q = L[k] * L[l];
          if (!ps.quad.empty()) q += ps.quad[i](k, l);
          out(k, l, i, i) = v * q;
        }
    }
    return out;
  };
  return chart;
}

MetricChart sphere_polar_chart() {
  MetricChart chart;
  chart.n = 2;
  chart.mode = DerivativeMode::Analytic;
  chart.g = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = 1.0;
    const double s = std::sin(x[0]);
    g(1, 1) = s * s;
    return g;
  };
  chart.dg = [](const Eigen::VectorXd& x) {
    Tensor3 out(2);
    out(0, 1, 1) = std::sin(2.0 * x[0]);
    return out;
  };
  chart.d2g = [](const Eigen::VectorXd& x) {
    Tensor4 out(2);
    out(0, 0, 1, 1) = 2.0 * std::cos(2.0 * x[0]);
    return out;
  };
  return chart;
}

ScalarField constant_field(int dim, double value) {
  ScalarField f;
  f.dim = dim;
  f.value = [value](const Eigen::VectorXd&) { return value; };
  f.gradient = [dim](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim); };
  f.hessian = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(dim, dim); };
  f.third = [dim](const Eigen::VectorXd&) { return Tensor3(dim); };
  return f;
}

ScalarField affine_field(const Eigen::VectorXd& a, double c) {
  const int dim = static_cast<int>(a.size());
  ScalarField f;
  f.dim = dim;
  f.value = [a, c](const Eigen::VectorXd& x) { return c + a.dot(x); };
  f.gradient = [a](const Eigen::VectorXd&) { return a; };
  f.hessian = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(dim, dim); };
  f.third = [dim](const Eigen::VectorXd&) { return Tensor3(dim); };
  return f;
}

ScalarField exp_quadratic_field(const Eigen::VectorXd& a, const Eigen::MatrixXd& Q, double c) {
  const int dim = static_cast<int>(a.size());
  if (Q.rows() != dim || Q.cols() != dim)
    throw std::invalid_argument("exp_quadratic_field: shape mismatch");
  ScalarField f;
  f.dim = dim;
  const auto val = [a, Q, c](const Eigen::VectorXd& x) {
    return std::exp(c + a.dot(x) + 0.5 * x.dot(Q * x));
  };
  f.value = val;
  f.gradient = [a, Q, val](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(val(x) * (a + Q * x));
  };
  f.hessian = [a, Q, val](const Eigen::VectorXd& x) {
    const Eigen::VectorXd w = a + Q * x;
    return Eigen::MatrixXd(val(x) * (w * w.transpose() + Q));
  };
  f.third = [a, Q, val, dim](const Eigen::VectorXd& x) {
    const Eigen::VectorXd w = a + Q * x;
    const double v = val(x);
    Tensor3 out(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          out(i, j, k) = v * (w[i] * w[j] * w[k] + w[i] * Q(j, k) + w[j] * Q(i, k) +
                              w[k] * Q(i, j));
    return out;
  };
  return f;
}

ScalarField cosine_field(double amp, double freq, double shift, double offset) {
  ScalarField f;
  f.dim = 1;
  f.value = [=](const Eigen::VectorXd& x) { return amp * std::cos(freq * x[0] + shift) + offset; };
  f.gradient = [=](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(1);
    g[0] = -amp * freq * std::sin(freq * x[0] + shift);
    return g;
  };
  f.hessian = [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = -amp * freq * freq * std::cos(freq * x[0] + shift);
    return h;
  };
  f.third = [=](const Eigen::VectorXd& x) {
    Tensor3 t(1);
    t(0, 0, 0) = amp * freq * freq * freq * std::sin(freq * x[0] + shift);
    return t;
  };
  return f;
}

}  // namespace warpcurv
