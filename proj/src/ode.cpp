#include "warpcurv/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace warpcurv {

namespace {

constexpr double kC2 = 1.0 / 5.0;
constexpr double kC3 = 3.0 / 10.0;
constexpr double kC4 = 4.0 / 5.0;
constexpr double kC5 = 8.0 / 9.0;

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& x0,
                  const Eigen::VectorXd& x1, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(x0[i]), std::abs(x1[i]));
    const double q = err[i] / sk;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step(const OdeRhs& rhs, double t0, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& f0, double dir, double span, double atol,
                    double rtol) {
  const Eigen::Index dim = x0.size();
  double d0 = 0.0, d1 = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double sk = atol + rtol * std::abs(x0[i]);
    d0 += (x0[i] / sk) * (x0[i] / sk);
    d1 += (f0[i] / sk) * (f0[i] / sk);
  }
  d0 = std::sqrt(d0 / dim);
  d1 = std::sqrt(d1 / dim);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);

  const Eigen::VectorXd x1 = x0 + dir * h0 * f0;
  const Eigen::VectorXd f1 = rhs(t0 + dir * h0, x1);
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double sk = atol + rtol * std::abs(x0[i]);
    const double q = (f1[i] - f0[i]) / sk;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / dim) / h0;

  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

Eigen::VectorXd DenseSegment::value(double t) const {
  const double th = (t - t_start) / width;
  Eigen::VectorXd out = coeff.col(5);
  for (int k = 4; k >= 0; --k) out = out * th + coeff.col(k);
  return out;
}

Eigen::VectorXd DenseSegment::derivative(double t) const {
  const double th = (t - t_start) / width;
  Eigen::VectorXd out = 5.0 * coeff.col(5);
  for (int k = 4; k >= 1; --k) out = out * th + k * coeff.col(k);
  return out / width;
}

double DenseSegment::integral(int i, double a, double b) const {
  const double ta = (a - t_start) / width;
  const double tb = (b - t_start) / width;
  double acc = 0.0;
  double pa = ta, pb = tb;
  for (int k = 0; k < 6; ++k) {
    acc += coeff(i, k) * (pb - pa) / (k + 1);
    pa *= ta;
    pb *= tb;
  }
  return acc * width;
}

DenseSegment hermite_quintic(double t0, double t1, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& f0, const Eigen::VectorXd& a0,
                             const Eigen::VectorXd& x1, const Eigen::VectorXd& f1,
                             const Eigen::VectorXd& a1) {
  const double h = t1 - t0;
  DenseSegment seg;
  seg.t_start = t0;
  seg.width = h;
  seg.coeff.resize(x0.size(), 6);

  const Eigen::VectorXd m0 = h * f0;
  const Eigen::VectorXd m1 = h * f1;
  const Eigen::VectorXd c0 = 0.5 * h * h * a0;
  const Eigen::VectorXd c1 = 0.5 * h * h * a1;
  const Eigen::VectorXd delta = x1 - x0 - m0 - c0;
  const Eigen::VectorXd e = m1 - m0 - 2.0 * c0;
  const Eigen::VectorXd f = 2.0 * (c1 - c0);

  seg.coeff.col(0) = x0;
  seg.coeff.col(1) = m0;
  seg.coeff.col(2) = c0;
  seg.coeff.col(5) = 6.0 * delta - 3.0 * e + 0.5 * f;
  seg.coeff.col(4) = 7.0 * e - 15.0 * delta - f;
  seg.coeff.col(3) = delta - seg.coeff.col(4) - seg.coeff.col(5);
  return seg;
}

MarchResult march(const OdeRhs& rhs, const OdeRhs& rhs_rate, double t0,
                  const Eigen::VectorXd& x0, double t_target, const OdeOptions& opt) {
  MarchResult result;
  result.t_end = t0;
  result.x_end = x0;
  if (t_target == t0) return result;

  const double dir = t_target > t0 ? 1.0 : -1.0;
  const double span = std::abs(t_target - t0);

  double t = t0;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd f = rhs(t, x);
  Eigen::VectorXd a = rhs_rate(t, x);
  double h = dir * initial_step(rhs, t0, x0, f, dir, span, opt.abs_tol, opt.rel_tol);

  Eigen::VectorXd k2, k3, k4, k5, k6, k7, x_new, err;
  for (long step = 0; step < opt.max_steps; ++step) {
    if (std::abs(h) < opt.min_step_scale * std::max(1.0, std::abs(t))) {
      result.outcome = EndpointStatus::StepUnderflow;
      result.t_end = t;
      result.x_end = x;
      return result;
    }
    bool landing = false;
    if (dir * (t + h - t_target) >= 0.0) {
      h = t_target - t;
      landing = true;
    }

    k2 = rhs(t + kC2 * h, x + h * (kA21 * f));
    k3 = rhs(t + kC3 * h, x + h * (kA31 * f + kA32 * k2));
    k4 = rhs(t + kC4 * h, x + h * (kA41 * f + kA42 * k2 + kA43 * k3));
    k5 = rhs(t + kC5 * h, x + h * (kA51 * f + kA52 * k2 + kA53 * k3 + kA54 * k4));
    k6 = rhs(t + h, x + h * (kA61 * f + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    x_new = x + h * (kB1 * f + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    k7 = rhs(t + h, x_new);
    err = h * (kE1 * f + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    const double en = x_new.allFinite() && err.allFinite()
                          ? error_norm(err, x, x_new, opt.abs_tol, opt.rel_tol)
                          : std::numeric_limits<double>::infinity();
    if (!(en <= 1.0)) {
      const double fac =
          std::isfinite(en) ? std::max(0.2, 0.55 * std::pow(en, -0.2)) : 0.25;
      h *= fac;
      continue;
    }

    const double t_new = landing ? t_target : t + h;
    const Eigen::VectorXd a_new = rhs_rate(t_new, x_new);
    // Two dense pieces per step halve the interpolation width; the derivative
    // residual of the quintic scales as width^5.
    const double t_mid = 0.5 * (t + t_new);
    const Eigen::VectorXd x_mid =
        hermite_quintic(t, t_new, x, f, a, x_new, k7, a_new).value(t_mid);
    const Eigen::VectorXd f_mid = rhs(t_mid, x_mid);
    const Eigen::VectorXd a_mid = rhs_rate(t_mid, x_mid);
    result.segments.push_back(hermite_quintic(t, t_mid, x, f, a, x_mid, f_mid, a_mid));
    result.segments.push_back(hermite_quintic(t_mid, t_new, x_mid, f_mid, a_mid, x_new, k7, a_new));
    t = t_new;
    x = x_new;
    f = k7;
    a = a_new;

    if (x.cwiseAbs().maxCoeff() > opt.blowup_norm) {
      result.outcome = EndpointStatus::BlowupDetected;
      result.t_end = t;
      result.x_end = x;
      return result;
    }
    if (landing) {
      result.outcome = EndpointStatus::ReachedRequested;
      result.t_end = t;
      result.x_end = x;
      return result;
    }
    h *= std::min(5.0, std::max(0.2, 0.55 * std::pow(std::max(en, 1e-10), -0.2)));
    if (std::abs(h) > span) h = dir * span;
  }
  throw std::runtime_error("ode march: step limit exceeded");
}

}  // namespace warpcurv
