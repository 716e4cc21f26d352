#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "warpcurv/core.hpp"
#include "warpcurv/rng.hpp"
#include "warpcurv/tensor.hpp"
#include "warpcurv/warped.hpp"

using namespace warpcurv;

namespace {

// Diagonal chart dt^2 + sum_j g_jj(t) (dx^j)^2 generated by the linear data
// y_j(t) = y0_j + p0_j t, so g_jj = exp(-2 y0_j t - p0_j t^2). Pointwise the
// closed-form Ricci eigenvalues apply at every (y(t), p(t)).
MetricChart linear_shape_chart(const Eigen::VectorXd& y0, const Eigen::VectorXd& p0) {
  const int d = static_cast<int>(y0.size());
  const int n = d + 1;
  const auto gjj = [y0, p0](int j, double t) {
    return std::exp(-2.0 * y0[j] * t - p0[j] * t * t);
  };
  MetricChart chart;
  chart.n = n;
  chart.mode = DerivativeMode::Analytic;
  chart.g = [gjj, d, n](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    g(0, 0) = 1.0;
    for (int j = 0; j < d; ++j) g(j + 1, j + 1) = gjj(j, x[0]);
    return g;
  };
  chart.dg = [gjj, y0, p0, d, n](const Eigen::VectorXd& x) {
    Tensor3 out(n);
    for (int j = 0; j < d; ++j)
      out(0, j + 1, j + 1) = -2.0 * (y0[j] + p0[j] * x[0]) * gjj(j, x[0]);
    return out;
  };
  chart.d2g = [gjj, y0, p0, d, n](const Eigen::VectorXd& x) {
    Tensor4 out(n);
    for (int j = 0; j < d; ++j) {
      const double yj = y0[j] + p0[j] * x[0];
      out(0, 0, j + 1, j + 1) = (4.0 * yj * yj - 2.0 * p0[j]) * gjj(j, x[0]);
    }
    return out;
  };
  return chart;
}

MetricChart as_difference_mode(const MetricChart& chart) {
  MetricChart copy = chart;
  copy.mode = DerivativeMode::CentralDifference;
  copy.dg = nullptr;
  copy.d2g = nullptr;
  return copy;
}

MetricChart random_diag_exp(SplitMix64& rng, int n, double amp = 0.3) {
  DiagExpParams params;
  params.c = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) params.c[i] = rng.uniform(-amp, amp);
  params.lin.resize(n);
  params.quad.resize(n);
  for (int i = 0; i < n; ++i) {
    params.lin[i] = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < n; ++k) params.lin[i][k] = rng.uniform(-amp, amp);
    Eigen::MatrixXd q(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) q(a, b) = rng.uniform(-amp, amp);
    params.quad[i] = 0.5 * (q + q.transpose().eval());
  }
  return diag_exp_chart(params);
}

Eigen::VectorXd random_point(SplitMix64& rng, int n, double amp = 0.4) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(-amp, amp);
  return x;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("Euclidean chart: everything vanishes") {
  const MetricChart chart = flat_chart(3);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  const CurvatureReport rep = curvature_at(chart, x);
  CHECK(rep.christoffel.max_abs() == 0.0);
  CHECK(rep.ricci.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.scalar == 0.0);
  CHECK(rep.weyl.max_abs() == 0.0);
  CHECK(rep.codazzi_defect_norm == 0.0);
  CHECK(rep.div_ricci_minus_half_ds_norm == 0.0);
}

TEST_CASE("round sphere chart from g_22 = cos^2 t") {
  MetricChart chart;
  chart.n = 2;
  chart.mode = DerivativeMode::Analytic;
  chart.g = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = 1.0;
    const double c = std::cos(x[0]);
    g(1, 1) = c * c;
    return g;
  };
  chart.dg = [](const Eigen::VectorXd& x) {
    Tensor3 d(2);
    d(0, 1, 1) = -std::sin(2.0 * x[0]);
    return d;
  };
  chart.d2g = [](const Eigen::VectorXd& x) {
    Tensor4 d(2);
    d(0, 0, 1, 1) = -2.0 * std::cos(2.0 * x[0]);
    return d;
  };

  for (const double t : {-0.9, -0.3, 0.0, 0.4, 1.1}) {
    const CurvatureReport rep = curvature_at(chart, vec2(t, 0.7));
    CHECK(rep.scalar == doctest::Approx(2.0).epsilon(1e-9));
    // Unit sphere Ricci equals the metric.
    CHECK((rep.ricci - chart.g(vec2(t, 0.7))).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(rep.codazzi_defect_norm < 1e-9);
  }

  // Difference mode reproduces the same values at its own tolerance.
  const MetricChart diff = as_difference_mode(chart);
  const CurvatureReport rep = curvature_at(diff, vec2(0.4, 0.7));
  CHECK(rep.scalar == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("construction-type chart matches the closed-form Ricci eigenvalues") {
  const Eigen::VectorXd y0 = vec2(1.0, 2.0);
  const Eigen::VectorXd p0 = Eigen::VectorXd::Zero(2);
  const MetricChart chart = linear_shape_chart(y0, p0);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  const CurvatureReport rep = curvature_at(chart, x);

  // Eigenvalues of g^{-1} r against (mu_1, mu_2, mu_3) = (-5, -3, -6).
  const Eigen::MatrixXd g = chart.g(x);
  Eigen::VectorXd eig =
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>(rep.ricci, g).eigenvalues();
  std::sort(eig.data(), eig.data() + eig.size());
  CHECK(eig[0] == doctest::Approx(-6.0).epsilon(1e-7));
  CHECK(eig[1] == doctest::Approx(-5.0).epsilon(1e-7));
  CHECK(eig[2] == doctest::Approx(-3.0).epsilon(1e-7));
  CHECK(rep.scalar == doctest::Approx(-14.0).epsilon(1e-9));
}

TEST_CASE("engine vs closed forms at random chart points, both modes") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 2);
    Eigen::VectorXd y0(n - 1), p0(n - 1);
    for (int j = 0; j < n - 1; ++j) y0[j] = rng.uniform(-1.5, 1.5);
    for (int j = 0; j < n - 1; ++j) p0[j] = rng.uniform(-1.5, 1.5);
    const MetricChart chart = linear_shape_chart(y0, p0);
    const double t = rng.uniform(-0.4, 0.4);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x[0] = t;

    const PhaseState state(y0 + t * p0, p0);
    const Eigen::VectorXd mu = ricci_eigenvalues(state);
    const double s_expected = scalar_invariant(state);

    for (const bool analytic : {true, false}) {
      const MetricChart& use = analytic ? chart : as_difference_mode(chart);
      const double tol = analytic ? 1e-7 : 1e-5;
      const CurvatureReport rep = curvature_at(use, x);
      CHECK(std::abs(rep.scalar - s_expected) < tol * std::max(1.0, std::abs(s_expected)));
      // mu_1 belongs to the t-direction, mu_{j+1} to x^{j+1}.
      const Eigen::MatrixXd g = use.g(x);
      CHECK(std::abs(rep.ricci(0, 0) - mu[0]) < tol * std::max(1.0, std::abs(mu[0])));
      for (int j = 0; j < n - 1; ++j) {
        const double mu_j = rep.ricci(j + 1, j + 1) / g(j + 1, j + 1);
        CHECK(std::abs(mu_j - mu[j + 1]) < tol * std::max(1.0, std::abs(mu[j + 1])));
      }
    }
  }
}

TEST_CASE("sectional curvature sign anchor: g^jj g^kk R_jkjk = -y_j y_k") {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd y0(3), p0(3);
    for (int j = 0; j < 3; ++j) y0[j] = rng.uniform(-1.5, 1.5);
    for (int j = 0; j < 3; ++j) p0[j] = rng.uniform(-1.5, 1.5);
    const MetricChart chart = linear_shape_chart(y0, p0);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    const CurvatureReport rep = curvature_at(chart, x);
    const Eigen::MatrixXd g = chart.g(x);
    for (int j = 1; j <= 3; ++j)
      for (int k = j + 1; k <= 3; ++k) {
        const double lhs = rep.riemann(j, k, j, k) / (g(j, j) * g(k, k));
        CHECK(lhs == doctest::Approx(-y0[j - 1] * y0[k - 1]).epsilon(1e-8));
      }
  }
}

TEST_CASE("Riemann symmetries, Bianchi, Weyl traces on random charts") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 2);
    const MetricChart chart = random_diag_exp(rng, n);
    const Eigen::VectorXd x = random_point(rng, n);

    for (const bool analytic : {true, false}) {
      const MetricChart& use = analytic ? chart : as_difference_mode(chart);
      const double tol = analytic ? 1e-8 : 1e-5;
      const CurvatureReport rep = curvature_at(use, x);
      const auto& R = rep.riemann;
      const double scale = std::max(1.0, R.max_abs());

      double sym = 0.0, bianchi = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
              sym = std::max(sym, std::abs(R(a, b, c, d) + R(b, a, c, d)));
              sym = std::max(sym, std::abs(R(a, b, c, d) + R(a, b, d, c)));
              sym = std::max(sym, std::abs(R(a, b, c, d) - R(c, d, a, b)));
              bianchi = std::max(
                  bianchi, std::abs(R(a, b, c, d) + R(b, c, a, d) + R(c, a, b, d)));
            }
      CHECK(sym <= tol * scale);
      CHECK(bianchi <= tol * scale);
      CHECK(rep.div_ricci_minus_half_ds_norm <= tol * scale);

      // Every single trace of the Weyl array vanishes.
      const Eigen::MatrixXd ginv = use.g(x).inverse();
      double trace_norm = 0.0;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double t1 = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) t1 += ginv(a, b) * rep.weyl(a, c, b, d);
          trace_norm = std::max(trace_norm, std::abs(t1));
        }
      CHECK(trace_norm <= tol * scale);
      if (n == 3) CHECK(rep.weyl.max_abs() <= tol * scale);
    }
  }
}

TEST_CASE("geodesic residuals") {
  // Chart lines t -> (t, x) are geodesics of the diagonal construction metric.
  const MetricChart chart = linear_shape_chart(vec2(1.0, 2.0), vec2(0.3, -0.4));
  const Curve t_line{
      [](double t) { return Eigen::VectorXd(Eigen::Vector3d(t, 0.7, -0.2)); },
      [](double) { return Eigen::VectorXd(Eigen::Vector3d(1, 0, 0)); },
      [](double) { return Eigen::VectorXd(Eigen::Vector3d(0, 0, 0)); }};
  CHECK(geodesic_residual(chart, t_line, 0.2) < 1e-10);

  const MetricChart flat = flat_chart(3);
  const Curve line{
      [](double t) { return Eigen::VectorXd(Eigen::Vector3d(1 + t, 2 - 3 * t, t)); },
      [](double) { return Eigen::VectorXd(Eigen::Vector3d(1, -3, 1)); },
      [](double) { return Eigen::VectorXd(Eigen::Vector3d(0, 0, 0)); }};
  CHECK(geodesic_residual(flat, line, 1.0) == 0.0);

  // A coordinate line in a fiber direction is not a geodesic: the residual
  // picks up Gamma^1_{22} = y_2 g_22 = 1 at t = 0.
  const MetricChart chart0 = linear_shape_chart(vec2(1.0, 2.0), Eigen::VectorXd::Zero(2));
  const Curve fiber_line{
      [](double u) { return Eigen::VectorXd(Eigen::Vector3d(0.0, u, 0.0)); },
      [](double) { return Eigen::VectorXd(Eigen::Vector3d(0, 1, 0)); },
      [](double) { return Eigen::VectorXd(Eigen::Vector3d(0, 0, 0)); }};
  CHECK(geodesic_residual(chart0, fiber_line, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Bochner identity residuals") {
  // Constant field on a curved chart.
  SplitMix64 rng(8);
  const MetricChart chart = random_diag_exp(rng, 3);
  const Eigen::VectorXd x = random_point(rng, 3);
  CHECK(bochner_residual(chart, constant_field(3, 4.2), x) < 1e-12);

  // phi = |x|^2 on the flat chart: both sides vanish separately.
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3);
  const ScalarField quad = exp_quadratic_field(a, Eigen::MatrixXd::Identity(3, 3), 0.0);
  ScalarField sq;
  sq.dim = 3;
  sq.value = [](const Eigen::VectorXd& q) { return q.squaredNorm(); };
  sq.gradient = [](const Eigen::VectorXd& q) { return Eigen::VectorXd(2.0 * q); };
  sq.hessian = [](const Eigen::VectorXd& q) {
    return Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(q.size(), q.size()));
  };
  sq.third = [](const Eigen::VectorXd& q) { return Tensor3(static_cast<int>(q.size())); };
  CHECK(bochner_residual(flat_chart(3), sq, x) < 1e-12);

  // Identity self-test on random charts and fields, analytic and differenced.
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 2);
    const MetricChart c = random_diag_exp(rng, n);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.uniform(-0.4, 0.4);
    const ScalarField f = exp_quadratic_field(w, Eigen::MatrixXd::Zero(n, n), 0.1);
    const Eigen::VectorXd q = random_point(rng, n);
    CHECK(bochner_residual(c, f, q) < 1e-8);

    ScalarField value_only;
    value_only.dim = n;
    value_only.value = f.value;
    CHECK(bochner_residual(as_difference_mode(c), value_only, q) < 1e-4);
  }
}

TEST_CASE("non-positive-definite metric is rejected") {
  MetricChart chart;
  chart.n = 2;
  chart.mode = DerivativeMode::CentralDifference;
  chart.g = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g(2, 2);
    g << 1.0, 0.0, 0.0, -1.0 + x[0];
    return g;
  };
  CHECK_THROWS_AS(curvature_at(chart, Eigen::VectorXd::Zero(2)), std::domain_error);
}
