#include "warpcurv/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "warpcurv/parallel.hpp"
#include "warpcurv/rng.hpp"

namespace warpcurv {

LinearizationReport linearize_zero(double q, int n) {
  if (n < 3) throw std::invalid_argument("linearize_zero: requires n >= 3");
  const int d = n - 1;

  LinearizationReport rep;
  rep.q = q;
  rep.n = n;
  rep.matrix = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  rep.matrix.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  rep.matrix.bottomLeftCorner(d, d) =
      q * q * Eigen::MatrixXd::Ones(d, d) - (n - 1) * q * q * Eigen::MatrixXd::Identity(d, d);
  rep.matrix.bottomRightCorner(d, d) = n * q * Eigen::MatrixXd::Identity(d, d);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(rep.matrix);
  Eigen::VectorXd ev(2 * d);
  for (int i = 0; i < 2 * d; ++i) ev[i] = solver.eigenvalues()[i].real();
  std::sort(ev.data(), ev.data() + ev.size());
  rep.eigenvalues = ev;

  Eigen::VectorXd expected(2 * d);
  int k = 0;
  expected[k++] = 0.0;
  expected[k++] = n * q;
  for (int i = 0; i < n - 2; ++i) expected[k++] = (n - 1) * q;
  for (int i = 0; i < n - 2; ++i) expected[k++] = q;
  std::sort(expected.data(), expected.data() + expected.size());
  rep.expected = expected;
  rep.spectrum_mismatch = (ev - expected).lpNorm<Eigen::Infinity>();

  // Eigenvector families: (yhat, lambda yhat) with yhat a multiple of the
  // identity for lambda in {0, nq}, and trace-free for {(n-1)q, q}.
  const auto residual = [&](const Eigen::VectorXd& yhat, double lambda) {
    Eigen::VectorXd v(2 * d);
    v.head(d) = yhat;
    v.tail(d) = lambda * yhat;
    const double scale = std::max({1.0, std::abs(q), q * q}) * v.lpNorm<Eigen::Infinity>();
    return (rep.matrix * v - lambda * v).lpNorm<Eigen::Infinity>() / scale;
  };
  double worst = 0.0;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
  worst = std::max(worst, residual(ones, 0.0));
  worst = std::max(worst, residual(ones, n * q));
  for (int i = 0; i + 1 < d; ++i) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    u[i] = 1.0;
    u[i + 1] = -1.0;
    worst = std::max(worst, residual(u, (n - 1) * q));
    worst = std::max(worst, residual(u, q));
  }
  rep.eigenspace_residual = worst;
  return rep;
}

PhaseState scaling_map(const PhaseState& state, double c) {
  if (c == 0.0) throw std::invalid_argument("scaling_map: c must be nonzero");
  return PhaseState(c * state.y, c * c * state.p);
}

BasinReport basin_experiment(int n, double xi, double zeta, double epsilon, int count,
                             std::uint64_t seed, double horizon, double pass_tol, double tol,
                             int threads) {
  if (n < 3) throw std::invalid_argument("basin_experiment: requires n >= 3");
  if (!(zeta > 0.0)) throw std::invalid_argument("basin_experiment: zeta must be positive");
  if (epsilon < 0.0) throw std::invalid_argument("basin_experiment: epsilon must be >= 0");
  if (count < 1) throw std::invalid_argument("basin_experiment: count >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("basin_experiment: horizon > 0");

  BasinReport rep;
  rep.n = n;
  rep.xi = xi;
  rep.zeta = zeta;
  rep.epsilon = epsilon;
  rep.count = count;
  rep.seed = seed;
  rep.horizon = horizon;
  rep.pass_tol = pass_tol;
  rep.a_abs = std::sqrt((2.0 * zeta + n * xi * xi) / (4.0 * n));
  rep.samples.resize(count);

  const int d = n - 1;
  parallel_for_index(count, threads, [&](int idx) {
    SplitMix64 rng = sample_stream(seed, static_cast<std::uint64_t>(idx));
    Eigen::VectorXd y0 = Eigen::VectorXd::Constant(d, xi);
    Eigen::VectorXd p0 = Eigen::VectorXd::Constant(d, -zeta);
    for (int j = 0; j < d; ++j) y0[j] += rng.uniform(-epsilon, epsilon);
    for (int j = 0; j < d; ++j) p0[j] += rng.uniform(-epsilon, epsilon);

    BasinSample sample;
    sample.index = idx;
    const PhaseState init(y0, p0);
    sample.s = scalar_invariant(init);
    const Trajectory traj = integrate(init, 0.0, {-horizon, horizon}, tol);
    sample.reached_minus = traj.status_minus() == EndpointStatus::ReachedRequested;
    sample.reached_plus = traj.status_plus() == EndpointStatus::ReachedRequested;
    const Eigen::VectorXd limit = 2.0 * rep.a_abs * Eigen::VectorXd::Ones(d);
    if (sample.reached_plus)
      sample.err_plus = (traj.state(horizon).y + limit).lpNorm<Eigen::Infinity>();
    if (sample.reached_minus)
      sample.err_minus = (traj.state(-horizon).y - limit).lpNorm<Eigen::Infinity>();
    if (sample.reached_minus && sample.reached_plus)
      sample.completeness = completeness_probe(traj, rep.a_abs, horizon).flag;
    sample.ok = sample.reached_minus && sample.reached_plus &&
                sample.err_minus <= pass_tol && sample.err_plus <= pass_tol &&
                sample.completeness == CompletenessFlag::NumericallyComplete;
    rep.samples[idx] = sample;
  });

  rep.all_ok = std::all_of(rep.samples.begin(), rep.samples.end(),
                           [](const BasinSample& s) { return s.ok; });
  return rep;
}

BlowupReport blowup_experiment(int n, int count, std::uint64_t seed, double t_max, double tol,
                               int threads) {
  if (n < 2) throw std::invalid_argument("blowup_experiment: requires n >= 2");
  if (count < 1) throw std::invalid_argument("blowup_experiment: count >= 1");
  if (!(t_max > 0.0)) throw std::invalid_argument("blowup_experiment: t_max > 0");

  BlowupReport rep;
  rep.n = n;
  rep.count = count;
  rep.seed = seed;
  rep.t_max = t_max;
  rep.samples.resize(count);

  const int d = n - 1;
  parallel_for_index(count, threads, [&](int idx) {
    SplitMix64 rng = sample_stream(seed, static_cast<std::uint64_t>(idx));
    Eigen::VectorXd y0(d);
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int j = 0; j < d; ++j) y0[j] = rng.uniform(-3.0, 3.0);
      if (std::abs(y0.sum()) >= 1.0) break;
    }
    if (std::abs(y0.sum()) < 1.0) y0[0] += y0.sum() >= 0 ? 1.0 : -1.0;

    Eigen::VectorXd p0(d);
    for (int j = 0; j < d; ++j) p0[j] = rng.uniform(-3.0, 3.0);
    // Shift tr p so that s lands at a nonnegative target value.
    const double s_target = rng.uniform(0.0, 4.0);
    const double tr_y = y0.sum();
    const double tr_p_needed = 0.5 * (s_target + y0.squaredNorm() + tr_y * tr_y);
    p0.array() += (tr_p_needed - p0.sum()) / d;

    BlowupSample sample;
    sample.index = idx;
    sample.y0 = y0;
    sample.p0 = p0;
    const PhaseState init(y0, p0);
    sample.s = scalar_invariant(init);
    const Trajectory traj = integrate(init, 0.0, {-t_max, t_max}, tol);
    sample.finite_minus = traj.status_minus() != EndpointStatus::ReachedRequested;
    sample.finite_plus = traj.status_plus() != EndpointStatus::ReachedRequested;
    sample.t_minus = traj.t_minus();
    sample.t_plus = traj.t_plus();
    rep.samples[idx] = sample;
  });

  rep.all_finite_side =
      std::all_of(rep.samples.begin(), rep.samples.end(),
                  [](const BlowupSample& s) { return s.finite_minus || s.finite_plus; });
  return rep;
}

}  // namespace warpcurv
