#include "warpcurv/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace warpcurv {

namespace {

const double kEps = std::numeric_limits<double>::epsilon();
const double kH1 = std::cbrt(kEps);          // first derivatives
const double kH2 = std::pow(kEps, 0.25);     // second derivatives
const double kH3 = 2e-3;                     // outer step above synthesized second derivatives

double axis_step(double base, const Eigen::VectorXd& x, int k) {
  return base * std::max(1.0, std::abs(x[k]));
}

Tensor3 diff_dg(const MetricFn& g, const Eigen::VectorXd& x, int n, double base) {
  Tensor3 out(n);
  Eigen::VectorXd xp = x, xm = x;
  for (int k = 0; k < n; ++k) {
    const double h = axis_step(base, x, k);
    xp[k] = x[k] + h;
    xm[k] = x[k] - h;
    const Eigen::MatrixXd d = (g(xp) - g(xm)) / (2.0 * h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(k, i, j) = d(i, j);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return out;
}

Tensor4 diff_d2g(const MetricFn& g, const Eigen::VectorXd& x, int n, double base) {
  Tensor4 out(n);
  const Eigen::MatrixXd g0 = g(x);
  Eigen::VectorXd xq = x;
  for (int k = 0; k < n; ++k) {
    const double hk = axis_step(base, x, k);
    xq[k] = x[k] + hk;
    const Eigen::MatrixXd gp = g(xq);
    xq[k] = x[k] - hk;
    const Eigen::MatrixXd gm = g(xq);
    xq[k] = x[k];
    const Eigen::MatrixXd d = (gp - 2.0 * g0 + gm) / (hk * hk);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(k, k, i, j) = d(i, j);
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const double hk = axis_step(base, x, k);
      const double hl = axis_step(base, x, l);
      Eigen::VectorXd xa = x;
      xa[k] += hk;
      xa[l] += hl;
      const Eigen::MatrixXd gpp = g(xa);
      xa[l] = x[l] - hl;
      const Eigen::MatrixXd gpm = g(xa);
      xa[k] = x[k] - hk;
      const Eigen::MatrixXd gmm = g(xa);
      xa[l] = x[l] + hl;
      const Eigen::MatrixXd gmp = g(xa);
      const Eigen::MatrixXd d = (gpp - gpm - gmp + gmm) / (4.0 * hk * hl);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          out(k, l, i, j) = d(i, j);
          out(l, k, i, j) = d(i, j);
        }
    }
  return out;
}

Tensor5 symmetrized_d3(const Tensor5& t, int n) {
  Tensor5 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            out(a, b, c, i, j) =
                (t(a, b, c, i, j) + t(a, c, b, i, j) + t(b, a, c, i, j) + t(b, c, a, i, j) +
                 t(c, a, b, i, j) + t(c, b, a, i, j)) /
                6.0;
  return out;
}

// d_m applied to a (k, l; i, j) second-derivative table.
Tensor5 diff_of_d2(const std::function<Tensor4(const Eigen::VectorXd&)>& d2,
                   const Eigen::VectorXd& x, int n, double base) {
  Tensor5 out(n);
  Eigen::VectorXd xq = x;
  for (int m = 0; m < n; ++m) {
    const double h = axis_step(base, x, m);
    xq[m] = x[m] + h;
    const Tensor4 tp = d2(xq);
    xq[m] = x[m] - h;
    const Tensor4 tm = d2(xq);
    xq[m] = x[m];
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            out(m, k, l, i, j) = (tp(k, l, i, j) - tm(k, l, i, j)) / (2.0 * h);
  }
  return symmetrized_d3(out, n);
}

Eigen::MatrixXd slice_dg(const Tensor3& dg, int k, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = dg(k, i, j);
  return m;
}

}  // namespace

MetricJet metric_jet(const MetricChart& chart, const Eigen::VectorXd& x) {
  if (chart.n < 1 || !chart.g) throw std::invalid_argument("metric_jet: chart not initialized");
  if (x.size() != chart.n) throw std::invalid_argument("metric_jet: point dimension mismatch");
  const int n = chart.n;

  MetricJet jet;
  jet.n = n;
  Eigen::MatrixXd g = chart.g(x);
  if (g.rows() != n || g.cols() != n)
    throw std::invalid_argument("metric_jet: metric evaluator has wrong shape");
  const double gn = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * gn)
    throw std::domain_error("metric_jet: metric not symmetric at x");
  g = 0.5 * (g + g.transpose().eval());
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("metric_jet: metric not positive definite at x");
  jet.g = g;
  jet.ginv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  const double h1 = chart.step > 0.0 ? chart.step : kH1;
  const double h2 = std::max(chart.step, kH2);
  const double h3 = std::max(chart.step, kH3);

  if (chart.mode == DerivativeMode::Analytic) {
    if (!chart.dg || !chart.d2g)
      throw std::invalid_argument("metric_jet: analytic chart must supply dg and d2g");
    jet.dg = chart.dg(x);
    jet.d2g = chart.d2g(x);
    jet.d3g = diff_of_d2(chart.d2g, x, n, kH1);
  } else {
    jet.dg = diff_dg(chart.g, x, n, h1);
    jet.d2g = diff_d2g(chart.g, x, n, h2);
    jet.d3g = diff_of_d2(
        [&](const Eigen::VectorXd& q) { return diff_d2g(chart.g, q, n, h2); }, x, n, h3);
  }

  // Christoffel symbols and their first two derivative tables.
  std::vector<Eigen::MatrixXd> dgM(n), dginv(n);
  for (int k = 0; k < n; ++k) {
    dgM[k] = slice_dg(jet.dg, k, n);
    dginv[k] = -jet.ginv * dgM[k] * jet.ginv;
  }

  const auto S = [&](int rho, int la, int mu) {
    return jet.dg(la, rho, mu) + jet.dg(mu, rho, la) - jet.dg(rho, la, mu);
  };
  const auto dS = [&](int s, int rho, int la, int mu) {
    return jet.d2g(s, la, rho, mu) + jet.d2g(s, mu, rho, la) - jet.d2g(s, rho, la, mu);
  };
  const auto d2S = [&](int t, int s, int rho, int la, int mu) {
    return jet.d3g(t, s, la, rho, mu) + jet.d3g(t, s, mu, rho, la) - jet.d3g(t, s, rho, la, mu);
  };

  jet.gamma = Tensor3(n);
  for (int nu = 0; nu < n; ++nu)
    for (int la = 0; la < n; ++la)
      for (int mu = la; mu < n; ++mu) {
        double acc = 0.0;
        for (int rho = 0; rho < n; ++rho) acc += jet.ginv(nu, rho) * S(rho, la, mu);
        jet.gamma(nu, la, mu) = 0.5 * acc;
        jet.gamma(nu, mu, la) = 0.5 * acc;
      }

  jet.dgamma = Tensor4(n);
  for (int s = 0; s < n; ++s)
    for (int nu = 0; nu < n; ++nu)
      for (int la = 0; la < n; ++la)
        for (int mu = la; mu < n; ++mu) {
          double acc = 0.0;
          for (int rho = 0; rho < n; ++rho)
            acc += dginv[s](nu, rho) * S(rho, la, mu) + jet.ginv(nu, rho) * dS(s, rho, la, mu);
          jet.dgamma(s, nu, la, mu) = 0.5 * acc;
          jet.dgamma(s, nu, mu, la) = 0.5 * acc;
        }

  jet.d2gamma = Tensor5(n);
  for (int t = 0; t < n; ++t)
    for (int s = t; s < n; ++s) {
      const Eigen::MatrixXd d2gM = [&] {
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) m(i, j) = jet.d2g(t, s, i, j);
        return m;
      }();
      const Eigen::MatrixXd d2ginv =
          -(dginv[t] * dgM[s] * jet.ginv + jet.ginv * d2gM * jet.ginv +
            jet.ginv * dgM[s] * dginv[t]);
      for (int nu = 0; nu < n; ++nu)
        for (int la = 0; la < n; ++la)
          for (int mu = la; mu < n; ++mu) {
            double acc = 0.0;
            for (int rho = 0; rho < n; ++rho)
              acc += d2ginv(nu, rho) * S(rho, la, mu) +
                     dginv[s](nu, rho) * dS(t, rho, la, mu) +
                     dginv[t](nu, rho) * dS(s, rho, la, mu) +
                     jet.ginv(nu, rho) * d2S(t, s, rho, la, mu);
            const double v = 0.5 * acc;
            jet.d2gamma(t, s, nu, la, mu) = v;
            jet.d2gamma(t, s, nu, mu, la) = v;
            jet.d2gamma(s, t, nu, la, mu) = v;
            jet.d2gamma(s, t, nu, mu, la) = v;
          }
    }

  // Curvature with the contraction convention that makes the round sphere's
  // Ricci tensor positive.
  const auto riem31 = [&](int la, int mu, int nu, int ka) {
    double acc = jet.dgamma(mu, ka, la, nu) - jet.dgamma(la, ka, mu, nu);
    for (int s = 0; s < n; ++s)
      acc += jet.gamma(s, la, nu) * jet.gamma(ka, mu, s) -
             jet.gamma(s, mu, nu) * jet.gamma(ka, la, s);
    return acc;
  };
  const auto driem31 = [&](int tau, int la, int mu, int nu, int ka) {
    double acc = jet.d2gamma(tau, mu, ka, la, nu) - jet.d2gamma(tau, la, ka, mu, nu);
    for (int s = 0; s < n; ++s)
      acc += jet.dgamma(tau, s, la, nu) * jet.gamma(ka, mu, s) +
             jet.gamma(s, la, nu) * jet.dgamma(tau, ka, mu, s) -
             jet.dgamma(tau, s, mu, nu) * jet.gamma(ka, la, s) -
             jet.gamma(s, mu, nu) * jet.dgamma(tau, ka, la, s);
    return acc;
  };

  jet.riemann = Tensor4(n);
  Tensor4 r31(n);
  for (int la = 0; la < n; ++la)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        for (int ka = 0; ka < n; ++ka) r31(la, mu, nu, ka) = riem31(la, mu, nu, ka);
  for (int la = 0; la < n; ++la)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        for (int ka = 0; ka < n; ++ka) {
          double acc = 0.0;
          for (int s = 0; s < n; ++s) acc += r31(la, mu, nu, s) * jet.g(s, ka);
          jet.riemann(la, mu, nu, ka) = acc;
        }

  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int mu = 0; mu < n; ++mu)
    for (int nu = 0; nu < n; ++nu) {
      double acc = 0.0;
      for (int rho = 0; rho < n; ++rho) acc += r31(mu, rho, nu, rho);
      ric(mu, nu) = acc;
    }
  jet.ricci = 0.5 * (ric + ric.transpose().eval());
  jet.scalar = (jet.ginv * jet.ricci).trace();

  Tensor3 dric(n);
  for (int tau = 0; tau < n; ++tau)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = mu; nu < n; ++nu) {
        double a1 = 0.0, a2 = 0.0;
        for (int rho = 0; rho < n; ++rho) {
          a1 += driem31(tau, mu, rho, nu, rho);
          a2 += driem31(tau, nu, rho, mu, rho);
        }
        const double v = 0.5 * (a1 + a2);
        dric(tau, mu, nu) = v;
        dric(tau, nu, mu) = v;
      }

  jet.dscalar = Eigen::VectorXd::Zero(n);
  for (int tau = 0; tau < n; ++tau) {
    double acc = 0.0;
    for (int la = 0; la < n; ++la)
      for (int mu = 0; mu < n; ++mu)
        acc += dginv[tau](la, mu) * jet.ricci(la, mu) + jet.ginv(la, mu) * dric(tau, la, mu);
    jet.dscalar[tau] = acc;
  }

  jet.nabla_ricci = Tensor3(n);
  for (int la = 0; la < n; ++la)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        double acc = dric(nu, la, mu);
        for (int s = 0; s < n; ++s)
          acc -= jet.gamma(s, nu, la) * jet.ricci(s, mu) +
                 jet.gamma(s, nu, mu) * jet.ricci(la, s);
        jet.nabla_ricci(la, mu, nu) = acc;
      }

  return jet;
}

CurvatureReport curvature_at(const MetricChart& chart, const Eigen::VectorXd& x) {
  const MetricJet jet = metric_jet(chart, x);
  const int n = jet.n;

  CurvatureReport rep;
  rep.christoffel = jet.gamma;
  rep.ricci = jet.ricci;
  rep.scalar = jet.scalar;
  rep.nabla_ricci = jet.nabla_ricci;
  rep.riemann = jet.riemann;

  rep.weyl = Tensor4(n);
  if (n >= 3) {
    const Eigen::MatrixXd schouten =
        (jet.ricci - jet.scalar / (2.0 * (n - 1)) * jet.g) / (n - 2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            rep.weyl(a, b, c, d) =
                jet.riemann(a, b, c, d) -
                (schouten(a, c) * jet.g(b, d) + schouten(b, d) * jet.g(a, c) -
                 schouten(a, d) * jet.g(b, c) - schouten(b, c) * jet.g(a, d));
  }

  double defect = 0.0;
  for (int la = 0; la < n; ++la)
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        defect = std::max(defect, std::abs(jet.nabla_ricci(mu, nu, la) -
                                           jet.nabla_ricci(la, nu, mu)));
  rep.codazzi_defect_norm = defect;

  double div_gap = 0.0;
  for (int mu = 0; mu < n; ++mu) {
    double div = 0.0;
    for (int la = 0; la < n; ++la)
      for (int nu = 0; nu < n; ++nu) div += jet.ginv(la, nu) * jet.nabla_ricci(nu, mu, la);
    div_gap = std::max(div_gap, std::abs(div - 0.5 * jet.dscalar[mu]));
  }
  rep.div_ricci_minus_half_ds_norm = div_gap;
  return rep;
}

double codazzi_defect(const MetricChart& chart, const Eigen::VectorXd& x) {
  return curvature_at(chart, x).codazzi_defect_norm;
}

double geodesic_residual(const MetricChart& chart, const Curve& curve, double t) {
  if (!curve.position || !curve.velocity || !curve.acceleration)
    throw std::invalid_argument("geodesic_residual: curve must supply x, xdot, xddot");
  const Eigen::VectorXd x = curve.position(t);
  const Eigen::VectorXd v = curve.velocity(t);
  const Eigen::VectorXd a = curve.acceleration(t);
  const MetricJet jet = metric_jet(chart, x);
  Eigen::VectorXd res = a;
  for (int nu = 0; nu < jet.n; ++nu)
    for (int la = 0; la < jet.n; ++la)
      for (int mu = 0; mu < jet.n; ++mu) res[nu] += jet.gamma(nu, la, mu) * v[la] * v[mu];
  return res.lpNorm<Eigen::Infinity>();
}

FieldJet field_jet(const ScalarField& phi, const Eigen::VectorXd& x) {
  if (phi.dim < 1 || !phi.value) throw std::invalid_argument("field_jet: field not initialized");
  const int n = phi.dim;
  FieldJet out;
  out.value = phi.value(x);

  const auto grad_of = [&](const Eigen::VectorXd& q) {
    if (phi.gradient) return Eigen::VectorXd(phi.gradient(q));
    Eigen::VectorXd g(n);
    Eigen::VectorXd xq = q;
    for (int k = 0; k < n; ++k) {
      const double h = axis_step(kH1, q, k);
      xq[k] = q[k] + h;
      const double fp = phi.value(xq);
      xq[k] = q[k] - h;
      const double fm = phi.value(xq);
      xq[k] = q[k];
      g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
  };
  out.gradient = grad_of(x);

  const auto hess_of = [&](const Eigen::VectorXd& q) {
    if (phi.hessian) return Eigen::MatrixXd(phi.hessian(q));
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd xq = q;
    for (int k = 0; k < n; ++k) {
      const double hk = axis_step(kH2, q, k);
      xq[k] = q[k] + hk;
      const Eigen::VectorXd gp = grad_of(xq);
      xq[k] = q[k] - hk;
      const Eigen::VectorXd gm = grad_of(xq);
      xq[k] = q[k];
      h.col(k) = (gp - gm) / (2.0 * hk);
    }
    return Eigen::MatrixXd(0.5 * (h + h.transpose().eval()));
  };
  out.hessian = hess_of(x);

  if (phi.third) {
    out.third = phi.third(x);
  } else {
    const double base = phi.hessian ? kH1 : kH3;
    Tensor3 raw(n);
    Eigen::VectorXd xq = x;
    for (int m = 0; m < n; ++m) {
      const double h = axis_step(base, x, m);
      xq[m] = x[m] + h;
      const Eigen::MatrixXd hp = hess_of(xq);
      xq[m] = x[m] - h;
      const Eigen::MatrixXd hm = hess_of(xq);
      xq[m] = x[m];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) raw(m, i, j) = (hp(i, j) - hm(i, j)) / (2.0 * h);
    }
    Tensor3 sym(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          sym(a, b, c) = (raw(a, b, c) + raw(b, a, c) + raw(c, a, b)) / 3.0;
    out.third = sym;
  }
  return out;
}

Eigen::VectorXd bochner_residual_form(const MetricChart& chart, const ScalarField& phi,
                                      const Eigen::VectorXd& x) {
  const MetricJet jet = metric_jet(chart, x);
  const FieldJet fj = field_jet(phi, x);
  const int n = jet.n;

  Eigen::MatrixXd hess_cov(n, n);
  for (int la = 0; la < n; ++la)
    for (int mu = 0; mu < n; ++mu) {
      double acc = fj.hessian(la, mu);
      for (int s = 0; s < n; ++s) acc -= jet.gamma(s, la, mu) * fj.gradient[s];
      hess_cov(la, mu) = acc;
    }

  std::vector<Eigen::MatrixXd> dginv(n), dhess(n);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd dgM(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dgM(i, j) = jet.dg(k, i, j);
    dginv[k] = -jet.ginv * dgM * jet.ginv;
    Eigen::MatrixXd dh(n, n);
    for (int la = 0; la < n; ++la)
      for (int mu = 0; mu < n; ++mu) {
        double acc = fj.third(k, la, mu);
        for (int s = 0; s < n; ++s)
          acc -= jet.dgamma(k, s, la, mu) * fj.gradient[s] +
                 jet.gamma(s, la, mu) * fj.hessian(s, k);
        dh(la, mu) = acc;
      }
    dhess[k] = dh;
  }

  const Eigen::VectorXd grad_up = jet.ginv * fj.gradient;

  Eigen::VectorXd form(n);
  for (int nu = 0; nu < n; ++nu) {
    double ric_term = 0.0;
    for (int la = 0; la < n; ++la) ric_term += jet.ricci(nu, la) * grad_up[la];

    double dlap = 0.0;
    for (int la = 0; la < n; ++la)
      for (int mu = 0; mu < n; ++mu)
        dlap += dginv[nu](la, mu) * hess_cov(la, mu) + jet.ginv(la, mu) * dhess[nu](la, mu);

    double div_h = 0.0;
    for (int la = 0; la < n; ++la)
      for (int mu = 0; mu < n; ++mu) {
        double cov = dhess[la](mu, nu);
        for (int s = 0; s < n; ++s)
          cov -= jet.gamma(s, la, mu) * hess_cov(s, nu) + jet.gamma(s, la, nu) * hess_cov(mu, s);
        div_h += jet.ginv(la, mu) * cov;
      }

    form[nu] = ric_term + dlap - div_h;
  }
  return form;
}

double bochner_residual(const MetricChart& chart, const ScalarField& phi,
                        const Eigen::VectorXd& x) {
  return bochner_residual_form(chart, phi, x).lpNorm<Eigen::Infinity>();
}

}  // namespace warpcurv
