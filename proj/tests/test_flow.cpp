#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "warpcurv/flow.hpp"
#include "warpcurv/rng.hpp"

using namespace warpcurv;

namespace {

const double kPi = 3.14159265358979323846;

PhaseState random_state(SplitMix64& rng, int n, double lo, double hi) {
  Diag y(n - 1), p(n - 1);
  for (int i = 0; i < n - 1; ++i) y[i] = rng.uniform(lo, hi);
  for (int i = 0; i < n - 1; ++i) p[i] = rng.uniform(lo, hi);
  return PhaseState(y, p);
}

double sup_state_distance(const Trajectory& a, const Trajectory& b, double lo, double hi,
                          int samples = 65) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / (samples - 1);
    const PhaseState sa = a.state(t);
    const PhaseState sb = b.state(t);
    worst = std::max(worst, (sa.y - sb.y).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (sa.p - sb.p).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

// Shared evaluable range of two trajectories, shrunk away from the endpoints.
std::pair<double, double> common_range(const Trajectory& a, const Trajectory& b,
                                       double shrink = 0.05) {
  const double lo = std::max(a.t_minus(), b.t_minus());
  const double hi = std::min(a.t_plus(), b.t_plus());
  const double w = hi - lo;
  return {lo + shrink * w, hi - shrink * w};
}

}  // namespace

TEST_CASE("integrate: identity-multiple decaying solution hits its closed form") {
  const PhaseState init(Diag::Zero(2), Diag::Constant(2, -6.0));
  const Trajectory traj = integrate(init, 0.0, {-10.0, 10.0}, 1e-10);
  CHECK(traj.status_minus() == EndpointStatus::ReachedRequested);
  CHECK(traj.status_plus() == EndpointStatus::ReachedRequested);

  const PhaseState s5 = traj.state(5.0);
  const double y_exact = -2.0 * std::tanh(15.0);
  const double p_exact = -6.0 / (std::cosh(15.0) * std::cosh(15.0));
  CHECK(std::abs(s5.y[0] - y_exact) < 1e-6);
  CHECK(std::abs(s5.y[1] - y_exact) < 1e-6);
  CHECK(std::abs(s5.p[0] - p_exact) < 1e-6);

  CHECK(traj.s0() == doctest::Approx(-24.0));
  CHECK(invariant_drift(traj, 256) < 1e-8 * 24.0);
}

TEST_CASE("integrate: zero initial state stays zero") {
  const Trajectory traj = integrate(PhaseState(Diag::Zero(2), Diag::Zero(2)), 0.0, {-7.0, 7.0});
  CHECK(traj.status_minus() == EndpointStatus::ReachedRequested);
  CHECK(traj.status_plus() == EndpointStatus::ReachedRequested);
  CHECK(traj.state(3.3).y.lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(traj.max_s_drift() < 1e-12);
}

TEST_CASE("integrate: growing identity-multiple solution blows up at +-pi/(2n)") {
  const int n = 3;
  const PhaseState init(Diag::Zero(n - 1), Diag::Constant(n - 1, 2.0 * n));
  const Trajectory traj = integrate(init, 0.0, {-10.0, 10.0}, 1e-10);
  CHECK(traj.status_minus() != EndpointStatus::ReachedRequested);
  CHECK(traj.status_plus() != EndpointStatus::ReachedRequested);
  CHECK(std::abs(traj.t_plus() - kPi / 6.0) < 1e-3);
  CHECK(std::abs(traj.t_minus() + kPi / 6.0) < 1e-3);
}

TEST_CASE("integrate: validation") {
  const PhaseState init(Diag::Zero(2), Diag::Zero(2));
  CHECK_THROWS_AS(integrate(init, 2.0, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(init, 0.5, {0.0, 1.0}, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(integrate(init, 0.5, {0.0, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("explicit_solution: bounded family frozen values") {
  const Trajectory traj = explicit_solution(ExplicitKind::Tanh, 3, 1.0, 0.0);
  const PhaseState s0 = traj.state(0.0);
  CHECK(s0.y.lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK(s0.p[0] == doctest::Approx(-6.0));
  CHECK(traj.s0() == doctest::Approx(-24.0));
  CHECK(invariant_drift(traj, 512) < 1e-12 * 24.0);

  const Trajectory scaled = explicit_solution(ExplicitKind::Tanh, 3, 2.0, 0.0);
  CHECK(scaled.s0() == doctest::Approx(-96.0));

  CHECK_THROWS_AS(explicit_solution(ExplicitKind::Tanh, 3, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("explicit_solution: blow-up family domain and invariant") {
  const Trajectory traj = explicit_solution(ExplicitKind::Tan, 2, 1.0, 0.0);
  CHECK(std::abs(traj.t_minus() + kPi / 4.0) < 1e-3);
  CHECK(std::abs(traj.t_plus() - kPi / 4.0) < 1e-3);
  CHECK(traj.status_plus() == EndpointStatus::BlowupDetected);
  CHECK(traj.s0() == doctest::Approx(8.0));
  CHECK(invariant_drift(traj, 512) < 1e-9 * 8.0);
}

TEST_CASE("explicit solutions satisfy the equation exactly") {
  for (const auto kind : {ExplicitKind::Tanh, ExplicitKind::Tan})
    for (const int n : {2, 3, 5})
      for (const double a : {0.5, 1.0, -2.0}) {
        const Trajectory traj = explicit_solution(kind, n, a, 0.3);
        CHECK(ode_residual(traj, 256) < 1e-12);
      }
}

TEST_CASE("trivial_extend: blow-up family gains zero components") {
  const Trajectory tan2 = explicit_solution(ExplicitKind::Tan, 2, 1.0, 0.0);
  const Trajectory ext = trivial_extend(tan2, 1);
  CHECK(ext.n() == 3);
  const PhaseState s = ext.state(0.3);
  CHECK(s.y[0] == doctest::Approx(2.0 * std::tan(0.6)));
  CHECK(s.y[1] == 0.0);
  CHECK(s.p[1] == 0.0);
  CHECK(ode_residual(ext, 256) < 1e-12);

  const Trajectory tanh3 = explicit_solution(ExplicitKind::Tanh, 3, 1.0, 0.0);
  CHECK(ode_residual(trivial_extend(tanh3, 2), 256) < 1e-10);

  CHECK_THROWS_AS(trivial_extend(tan2, 0), std::invalid_argument);
}

TEST_CASE("apply_symmetry: scaling by -1 matches the explicit family") {
  const Trajectory base = explicit_solution(ExplicitKind::Tanh, 3, 1.0, 0.0);
  const Trajectory flipped = apply_symmetry(base, SymmetryElement::scaling(-1.0));
  const Trajectory direct = explicit_solution(ExplicitKind::Tanh, 3, -1.0, 0.0);
  CHECK(sup_state_distance(flipped, direct, -3.0, 3.0) < 1e-12);
}

TEST_CASE("apply_symmetry: identity element reproduces the trajectory") {
  const Trajectory base = explicit_solution(ExplicitKind::Tanh, 4, 1.0, 0.2);
  const Trajectory same = apply_symmetry(base, SymmetryElement::k_element(+1, 0.0));
  CHECK(sup_state_distance(base, same, -2.0, 2.0) == 0.0);
}

TEST_CASE("apply_symmetry: scaling multiplies the invariant by a^2") {
  SplitMix64 rng(7);
  const PhaseState init = random_state(rng, 4, -1.0, 1.0);
  const Trajectory traj = integrate(init, 0.0, {-2.0, 2.0});
  const Trajectory scaled = apply_symmetry(traj, SymmetryElement::scaling(2.0));
  CHECK(scaled.s0() == doctest::Approx(4.0 * traj.s0()).epsilon(1e-12));
  const auto [lo, hi] = scaled.sample_window();
  for (int i = 1; i < 8; ++i) {
    const double t = lo + (hi - lo) * i / 8.0;
    const double s_here = scalar_invariant(scaled.state(t));
    const double s_base = scalar_invariant(traj.state(2.0 * t));
    CHECK(s_here == doctest::Approx(4.0 * s_base).epsilon(1e-9));
  }
}

TEST_CASE("apply_symmetry: validation") {
  const Trajectory base = explicit_solution(ExplicitKind::Tanh, 4, 1.0, 0.0);
  CHECK_THROWS_AS(apply_symmetry(base, SymmetryElement::k_element(+1, 0.0, {0, 1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_symmetry(base, SymmetryElement::k_element(+1, 0.0, {0, 0, 1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_symmetry(base, SymmetryElement::scaling(0.0)), std::invalid_argument);
}

TEST_CASE("k_equivalent: recovers a random group element") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 2);
    const int d = n - 1;
    const PhaseState init = random_state(rng, n, -1.2, 1.2);
    const Trajectory base = integrate(init, 0.0, {-2.5, 2.5});

    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    for (int i = d - 1; i > 0; --i) std::swap(perm[i], perm[rng.next() % (i + 1)]);
    const int sign = rng.uniform() < 0.5 ? 1 : -1;
    const double shift = rng.uniform(-0.5, 0.5);
    const SymmetryElement elem = SymmetryElement::k_element(sign, shift, perm);

    const Trajectory moved = apply_symmetry(base, elem);
    const auto witness = k_equivalent(base, moved, 1e-6);
    REQUIRE(witness.has_value());
    const Trajectory recovered = apply_symmetry(base, *witness);
    const auto [wlo, whi] = moved.sample_window();
    const auto [rlo, rhi] = recovered.sample_window();
    const double lo = std::max(wlo, rlo), hi = std::min(whi, rhi);
    CHECK(sup_state_distance(recovered, moved, lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo)) <
          1e-6);
    if (witness->sign == sign) CHECK(std::abs(witness->shift - shift) < 1e-6);
  }
}

TEST_CASE("k_equivalent: a trajectory is equivalent to itself by the identity") {
  const Trajectory traj = explicit_solution(ExplicitKind::Tanh, 3, 1.0, 0.0);
  const auto witness = k_equivalent(traj, traj, 1e-8);
  REQUIRE(witness.has_value());
  CHECK(witness->sign == 1);
  CHECK(std::abs(witness->shift) < 1e-8);
}

TEST_CASE("k_equivalent: scaling is not in the searched group") {
  const Trajectory a1 = explicit_solution(ExplicitKind::Tanh, 3, 1.0, 0.0);
  const Trajectory a2 = explicit_solution(ExplicitKind::Tanh, 3, 2.0, 0.0);
  CHECK_FALSE(k_equivalent(a1, a2, 1e-6).has_value());
}

TEST_CASE("k_equivalent: capacity bound") {
  const Trajectory big = explicit_solution(ExplicitKind::Tanh, 9, 1.0, 0.0);
  CHECK_THROWS_AS(k_equivalent(big, big, 1e-6), std::length_error);
}

TEST_CASE("invariant_drift: corrupted momentum is detected") {
  const PhaseState init(Diag::Zero(2), Diag::Constant(2, -6.0));
  const Trajectory traj = integrate(init, 0.0, {-4.0, 4.0});
  CHECK(invariant_drift(traj, 256) < 1e-8 * 24.0);

  const Trajectory bad = scale_momentum(traj, 1.01);
  CHECK(invariant_drift(bad, 256) > 1e-3 * std::abs(bad.s0()));
}

TEST_CASE("conservation: random initial states keep s to 1e-8 relative") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 3);
    const PhaseState init = random_state(rng, n, -3.0, 3.0);
    const Trajectory traj = integrate(init, 0.0, {-5.0, 5.0}, 1e-10);
    CHECK(relative_invariant_drift(traj, 256) < 1e-8);
  }
}

TEST_CASE("dense interpolant residual stays within 10x the tolerance") {
  SplitMix64 rng(321);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 3);
    const PhaseState init = random_state(rng, n, -1.5, 1.5);
    const Trajectory traj = integrate(init, 0.0, {-4.0, 4.0}, 1e-10);
    CHECK(ode_residual(traj, 257) <= 10.0 * 1e-10);
  }
}

TEST_CASE("flow equivariance: transforming data commutes with integration") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    const PhaseState init = random_state(rng, 3, -1.0, 1.0);
    const Trajectory base = integrate(init, 0.0, {-3.0, 3.0});

    const SymmetryElement elem =
        SymmetryElement::k_element(trial % 2 == 0 ? 1 : -1, rng.uniform(-0.4, 0.4), {1, 0});
    const Trajectory moved = apply_symmetry(base, elem);
    const double t0 = 0.5 * (moved.sample_window().first + moved.sample_window().second);
    const Trajectory reproduced = integrate(moved.state(t0), t0, {t0 - 2.0, t0 + 2.0});
    const auto [lo, hi] = common_range(reproduced, moved);
    CHECK(sup_state_distance(reproduced, moved, lo, hi) < 1e-7);
  }
}

TEST_CASE("scaling conjugacy: F_a x0 integrates to the time-scaled trajectory") {
  SplitMix64 rng(18);
  for (const double a : {2.0, -1.5, 0.5}) {
    const PhaseState init = random_state(rng, 3, -1.0, 1.0);
    const Trajectory base = integrate(init, 0.0, {-3.0, 3.0});
    const Trajectory scaled = apply_symmetry(base, SymmetryElement::scaling(a));
    const Trajectory direct =
        integrate(PhaseState(a * init.y, a * a * init.p), 0.0,
                  {-3.0 / std::abs(a), 3.0 / std::abs(a)});
    const auto [lo, hi] = common_range(direct, scaled);
    CHECK(sup_state_distance(direct, scaled, lo, hi) < 1e-7);
  }
}

TEST_CASE("state evaluation outside the domain is an error") {
  const Trajectory traj = explicit_solution(ExplicitKind::Tan, 3, 1.0, 0.0);
  CHECK_THROWS_AS(traj.state(10.0), std::domain_error);
  CHECK_THROWS_AS(traj.state(-10.0), std::domain_error);
}
