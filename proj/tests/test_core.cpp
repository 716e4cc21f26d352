#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "warpcurv/core.hpp"
#include "warpcurv/rng.hpp"

using namespace warpcurv;

namespace {

Diag vec2(double a, double b) {
  Diag v(2);
  v << a, b;
  return v;
}

PhaseState random_state(SplitMix64& rng, int n, double lo = -3.0, double hi = 3.0) {
  Diag y(n - 1), p(n - 1);
  for (int i = 0; i < n - 1; ++i) y[i] = rng.uniform(lo, hi);
  for (int i = 0; i < n - 1; ++i) p[i] = rng.uniform(lo, hi);
  return PhaseState(y, p);
}

}  // namespace

TEST_CASE("phase_vector_field: zero curve q * (identity, 0)") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 4);
    const double q = rng.uniform(-10.0, 10.0);
    const PhaseState z(Diag::Constant(n - 1, q), Diag::Zero(n - 1));
    const PhaseState v = phase_vector_field(z);
    const double cube = n * (1.0 + std::abs(q)) * (1.0 + std::abs(q)) * (1.0 + std::abs(q));
    CHECK(v.y.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(v.p.lpNorm<Eigen::Infinity>() <=
          32.0 * std::numeric_limits<double>::epsilon() * cube);
  }
}

TEST_CASE("phase_vector_field: origin and a hand-evaluated point") {
  const PhaseState origin(Diag::Zero(2), Diag::Zero(2));
  const PhaseState v0 = phase_vector_field(origin);
  CHECK(v0.y.norm() == 0.0);
  CHECK(v0.p.norm() == 0.0);

  // n = 3, y = diag(1, -1), p = 0: tr y = 0, tr y^2 = 2, so pdot = 2 y.
  const PhaseState s(vec2(1.0, -1.0), Diag::Zero(2));
  const PhaseState v = phase_vector_field(s);
  CHECK(v.y.norm() == 0.0);
  CHECK(v.p[0] == doctest::Approx(2.0));
  CHECK(v.p[1] == doctest::Approx(-2.0));
}

TEST_CASE("phase_vector_field: dimension mismatch rejected") {
  Diag y(2), p(3);
  y << 1, 2;
  p << 1, 2, 3;
  CHECK_THROWS_AS(PhaseState(y, p), std::invalid_argument);
}

TEST_CASE("scalar_invariant: frozen values") {
  CHECK(scalar_invariant(PhaseState(Diag::Zero(2), Diag::Zero(2))) == 0.0);
  CHECK(scalar_invariant(PhaseState(Diag::Constant(2, -2.0), Diag::Zero(2))) ==
        doctest::Approx(-24.0).epsilon(1e-15));
  CHECK(scalar_invariant(PhaseState(vec2(1.0, 2.0), Diag::Zero(2))) ==
        doctest::Approx(-14.0).epsilon(1e-15));
}

TEST_CASE("ricci_eigenvalues: frozen values and sum identity") {
  const Eigen::VectorXd mu0 = ricci_eigenvalues(PhaseState(Diag::Zero(2), Diag::Zero(2)));
  CHECK(mu0.norm() == 0.0);

  const Eigen::VectorXd mu1 =
      ricci_eigenvalues(PhaseState(Diag::Zero(2), Diag::Constant(2, -6.0)));
  CHECK(mu1[0] == doctest::Approx(-12.0));
  CHECK(mu1[1] == doctest::Approx(-6.0));
  CHECK(mu1[2] == doctest::Approx(-6.0));
  CHECK(mu1.sum() == doctest::Approx(-24.0));

  const Eigen::VectorXd mu2 = ricci_eigenvalues(PhaseState(vec2(1.0, 2.0), Diag::Zero(2)));
  CHECK(mu2[0] == doctest::Approx(-5.0));
  CHECK(mu2[1] == doctest::Approx(-3.0));
  CHECK(mu2[2] == doctest::Approx(-6.0));
}

TEST_CASE("sum of eigenvalues equals the invariant to a few ulps") {
  SplitMix64 rng(22);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 6);
    const PhaseState s = random_state(rng, n);
    const double sv = scalar_invariant(s);
    const Eigen::VectorXd mu = ricci_eigenvalues(s);
    const double tr_y = s.y.sum();
    const double largest = std::max({1.0, std::abs(2.0 * s.p.sum()), s.y.squaredNorm(),
                                     tr_y * tr_y, mu.cwiseAbs().maxCoeff()});
    CHECK(std::abs(mu.sum() - sv) <= 8.0 * eps * largest);
  }
}

TEST_CASE("is_ricci_generic: examples and tolerance validation") {
  CHECK(is_ricci_generic(PhaseState(vec2(1.0, 2.0), Diag::Zero(2)), 1e-8));
  CHECK_FALSE(is_ricci_generic(PhaseState(Diag::Zero(2), Diag::Zero(2)), 1e-8));
  CHECK_FALSE(is_ricci_generic(PhaseState(Diag::Zero(2), Diag::Constant(2, -6.0)), 1e-8));
  CHECK_THROWS_AS(is_ricci_generic(PhaseState(vec2(1.0, 2.0), Diag::Zero(2)), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(is_ricci_generic(PhaseState(vec2(1.0, 2.0), Diag::Zero(2)), -1.0),
                  std::invalid_argument);
}

TEST_CASE("permutation equivariance of field, eigenvalues, invariant") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 5);
    const int d = n - 1;
    const PhaseState s = random_state(rng, n);

    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    for (int i = d - 1; i > 0; --i) std::swap(perm[i], perm[rng.next() % (i + 1)]);

    Diag py(d), pp(d);
    for (int i = 0; i < d; ++i) {
      py[i] = s.y[perm[i]];
      pp[i] = s.p[perm[i]];
    }
    const PhaseState sp(py, pp);

    CHECK(scalar_invariant(sp) == doctest::Approx(scalar_invariant(s)).epsilon(1e-14));

    const PhaseState v = phase_vector_field(s);
    const PhaseState vp = phase_vector_field(sp);
    const Eigen::VectorXd mu = ricci_eigenvalues(s);
    const Eigen::VectorXd mup = ricci_eigenvalues(sp);
    CHECK(mup[0] == doctest::Approx(mu[0]).epsilon(1e-13));
    for (int i = 0; i < d; ++i) {
      CHECK(vp.p[i] == doctest::Approx(v.p[perm[i]]).epsilon(1e-13));
      CHECK(mup[i + 1] == doctest::Approx(mu[perm[i] + 1]).epsilon(1e-13));
    }
  }
}

TEST_CASE("time reversal: the second field component is odd in y") {
  // If t -> y(t) solves the equation so does t -> -y(-t); infinitesimally
  // G(-y, p) = -G(y, p) for every p.
  SplitMix64 rng(44);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 5);
    const PhaseState s = random_state(rng, n);
    const Diag lhs = shape_acceleration(-s.y, s.p);
    const Diag rhs = -shape_acceleration(s.y, s.p);
    const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-13 * scale);
  }
}

TEST_CASE("shape_acceleration_rate matches finite differences along the flow") {
  SplitMix64 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 3);
    const PhaseState s = random_state(rng, n, -1.5, 1.5);
    const double h = 1e-6;
    // Advance (y, p) along the flow by +-h with a 4th-order Taylor step.
    const auto flow_step = [&](double dt) {
      const Diag g = shape_acceleration(s.y, s.p);
      const Diag gr = shape_acceleration_rate(s.y, s.p);
      const Diag y1 = s.y + dt * s.p + 0.5 * dt * dt * g + dt * dt * dt / 6.0 * gr;
      const Diag p1 = s.p + dt * g + 0.5 * dt * dt * gr;
      return shape_acceleration(y1, p1);
    };
    const Diag num = (flow_step(h) - flow_step(-h)) / (2.0 * h);
    const Diag ana = shape_acceleration_rate(s.y, s.p);
    const double scale = std::max(1.0, ana.lpNorm<Eigen::Infinity>());
    CHECK((num - ana).lpNorm<Eigen::Infinity>() <= 1e-6 * scale);
  }
}
