#include "warpcurv/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "warpcurv/parallel.hpp"
#include "warpcurv/rng.hpp"

namespace warpcurv {

WarpChart::WarpChart(Trajectory traj, Eigen::VectorXd g0, double t0)
    : traj_(std::move(traj)), g0_(std::move(g0)), t0_(t0) {
  if (g0_.size() != traj_.dim())
    throw std::invalid_argument("WarpChart: g0 must have n-1 entries");
  if (!(g0_.minCoeff() > 0.0)) throw std::invalid_argument("WarpChart: g0 must be positive");
  if (!traj_.contains(t0_)) throw std::domain_error("WarpChart: t0 outside trajectory domain");
}

WarpChart build_metric(const Trajectory& traj, const Eigen::VectorXd& g0, double t0) {
  return WarpChart(traj, g0, t0);
}

double WarpChart::warp(int comp, double t) const {
  return g0_[comp] * std::exp(-2.0 * traj_.warp_integral(comp, t0_, t));
}

double WarpChart::warp_dt(int comp, double t) const {
  return -2.0 * traj_.state(t).y[comp] * warp(comp, t);
}

double WarpChart::warp_dtt(int comp, double t) const {
  const PhaseState s = traj_.state(t);
  return (4.0 * s.y[comp] * s.y[comp] - 2.0 * s.p[comp]) * warp(comp, t);
}

namespace {

MetricChart chart_of_slice(const WarpChart& wc, int fibers) {
  MetricChart chart;
  chart.n = fibers + 1;
  chart.mode = DerivativeMode::Analytic;
  chart.g = [wc, fibers](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(fibers + 1, fibers + 1);
    g(0, 0) = 1.0;
    for (int j = 0; j < fibers; ++j) g(j + 1, j + 1) = wc.warp(j, x[0]);
    return g;
  };
  chart.dg = [wc, fibers](const Eigen::VectorXd& x) {
    Tensor3 d(fibers + 1);
    for (int j = 0; j < fibers; ++j) d(0, j + 1, j + 1) = wc.warp_dt(j, x[0]);
    return d;
  };
  chart.d2g = [wc, fibers](const Eigen::VectorXd& x) {
    Tensor4 d(fibers + 1);
    for (int j = 0; j < fibers; ++j) d(0, 0, j + 1, j + 1) = wc.warp_dtt(j, x[0]);
    return d;
  };
  return chart;
}

}  // namespace

MetricChart WarpChart::metric_chart() const { return chart_of_slice(*this, fibers()); }

MetricChart WarpChart::base_slice_chart(int keep) const {
  if (keep < 0 || keep > fibers())
    throw std::invalid_argument("base_slice_chart: keep out of range");
  return chart_of_slice(*this, keep);
}

ScalarField WarpChart::warp_sqrt_field(int comp, int field_dim) const {
  if (comp < 0 || comp >= fibers()) throw std::invalid_argument("warp_sqrt_field: bad component");
  if (field_dim < 1) throw std::invalid_argument("warp_sqrt_field: field_dim >= 1");
  const WarpChart wc = *this;
  ScalarField f;
  f.dim = field_dim;
  f.value = [wc, comp](const Eigen::VectorXd& x) { return std::sqrt(wc.warp(comp, x[0])); };
  f.gradient = [wc, comp, field_dim](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(field_dim);
    const double phi = std::sqrt(wc.warp(comp, x[0]));
    g[0] = -wc.trajectory().state(x[0]).y[comp] * phi;
    return g;
  };
  f.hessian = [wc, comp, field_dim](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(field_dim, field_dim);
    const double phi = std::sqrt(wc.warp(comp, x[0]));
    const PhaseState s = wc.trajectory().state(x[0]);
    h(0, 0) = (s.y[comp] * s.y[comp] - s.p[comp]) * phi;
    return h;
  };
  f.third = [wc, comp, field_dim](const Eigen::VectorXd& x) {
    Tensor3 t3(field_dim);
    const double phi = std::sqrt(wc.warp(comp, x[0]));
    const PhaseState s = wc.trajectory().state(x[0]);
    const double y = s.y[comp], p = s.p[comp];
    const double g = shape_acceleration(s.y, s.p)[comp];
    t3(0, 0, 0) = (3.0 * y * p - g - y * y * y) * phi;
    return t3;
  };
  return f;
}

Eigen::VectorXd harmonic_residual(const PhaseState& state, const Diag& yddot) {
  if (yddot.size() != state.y.size())
    throw std::invalid_argument("harmonic_residual: yddot dimension mismatch");
  const double tr_y = state.y.sum();
  const double tr_p = state.p.sum();
  const Eigen::VectorXd mu = ricci_eigenvalues(state);
  const Eigen::VectorXd mu_rate = yddot - tr_y * state.p - tr_p * state.y;
  return (mu_rate.array() - state.y.array() * (mu.tail(state.dim()).array() - mu[0])).matrix();
}

Eigen::VectorXd harmonic_residual(const WarpChart& chart, double t) {
  const PhaseState s = chart.trajectory().state(t);
  const PhaseState v = chart.trajectory().state_derivative(t);
  return harmonic_residual(s, v.p);
}

double weyl_sectional(const PhaseState& state, int fiber_j, int fiber_k) {
  const int d = state.dim();
  if (d < 2) throw std::invalid_argument("weyl_sectional: requires n >= 3");
  if (fiber_j < 0 || fiber_k < 0 || fiber_j >= d || fiber_k >= d || fiber_j == fiber_k)
    throw std::invalid_argument("weyl_sectional: bad fiber indices");
  const int n = state.n();
  const double tr_y = state.y.sum();
  const double yj = state.y[fiber_j], yk = state.y[fiber_k];
  const double pj = state.p[fiber_j], pk = state.p[fiber_k];
  return 2.0 * state.p.sum() - state.y.squaredNorm() - tr_y * tr_y +
         (n - 1) * ((yj + yk) * tr_y - (n - 2) * yj * yk - pj - pk);
}

double weyl_sectional(const WarpChart& chart, double t, int fiber_j, int fiber_k) {
  return weyl_sectional(chart.trajectory().state(t), fiber_j, fiber_k);
}

CompletenessReport completeness_probe(const Trajectory& traj, double delta, double T,
                                      int samples) {
  if (!(delta > 0.0) || !(T > 0.0))
    throw std::invalid_argument("completeness_probe: delta and T must be positive");
  if (samples < 2) throw std::invalid_argument("completeness_probe: samples >= 2");

  CompletenessReport rep;
  rep.reached_minus = traj.t_minus() <= -T;
  rep.reached_plus = traj.t_plus() >= T;
  if (!rep.reached_minus || !rep.reached_plus) {
    const bool cut = (!rep.reached_minus && traj.status_minus() != EndpointStatus::ReachedRequested) ||
                     (!rep.reached_plus && traj.status_plus() != EndpointStatus::ReachedRequested);
    rep.flag = cut ? CompletenessFlag::DomainFinite : CompletenessFlag::Inconclusive;
    return rep;
  }

  double m_plus = std::numeric_limits<double>::infinity();
  double m_minus = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = T / 2.0 + (T / 2.0) * i / (samples - 1);
    m_plus = std::min(m_plus, (-traj.state(t).y).minCoeff());
    m_minus = std::min(m_minus, traj.state(-t).y.minCoeff());
  }
  rep.margin_plus = m_plus;
  rep.margin_minus = m_minus;
  rep.flag = (m_plus >= delta && m_minus >= delta) ? CompletenessFlag::NumericallyComplete
                                                   : CompletenessFlag::Inconclusive;
  return rep;
}

ClassificationReport classify(const Trajectory& traj, double t_probe, double rel_tol) {
  if (traj.n() < 3) throw std::length_error("classify: requires n >= 3");
  if (!traj.contains(t_probe)) throw std::domain_error("classify: t_probe outside domain");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("classify: rel_tol must be positive");

  ClassificationReport rep;
  rep.probe_time = t_probe;
  rep.s = traj.s0();

  const auto [lo, hi] = traj.sample_window();
  const int kGenericSamples = 129;
  for (int i = 0; i < kGenericSamples && !rep.ricci_generic; ++i) {
    const double t = lo + (hi - lo) * i / (kGenericSamples - 1);
    rep.ricci_generic = is_ricci_generic(traj.state(t), rel_tol);
  }

  const PhaseState s = traj.state(t_probe);
  const Eigen::VectorXd mu = ricci_eigenvalues(s);
  const double y_scale = std::max(1.0, s.y.lpNorm<Eigen::Infinity>());

  double parallel_obstruction = 0.0;
  double mu_gap_scale = 1.0;
  for (int j = 0; j < s.dim(); ++j) {
    parallel_obstruction = std::max(parallel_obstruction, std::abs(s.y[j] * (mu[j + 1] - mu[0])));
    mu_gap_scale = std::max(mu_gap_scale, std::abs(mu[j + 1] - mu[0]));
  }
  rep.not_ricci_parallel = parallel_obstruction > rel_tol * y_scale * mu_gap_scale;
  rep.not_locally_reducible = s.y.cwiseAbs().minCoeff() > rel_tol * y_scale;

  if (traj.n() >= 4) {
    const double tr_y = s.y.sum();
    double w_max = 0.0;
    double w_scale = 1.0;
    for (int j = 0; j < s.dim(); ++j)
      for (int k = j + 1; k < s.dim(); ++k) {
        w_max = std::max(w_max, std::abs(weyl_sectional(s, j, k)));
        const double terms = 2.0 * std::abs(s.p.sum()) + s.y.squaredNorm() + tr_y * tr_y +
                             (traj.n() - 1) * (std::abs((s.y[j] + s.y[k]) * tr_y) +
                                               (traj.n() - 2) * std::abs(s.y[j] * s.y[k]) +
                                               std::abs(s.p[j]) + std::abs(s.p[k]));
        w_scale = std::max(w_scale, terms);
      }
    rep.not_conformally_flat = w_max > rel_tol * w_scale;
  }
  return rep;
}

std::vector<ModuliRecord> sample_moduli(int n, int count, std::pair<double, double> box,
                                        std::uint64_t seed, double T,
                                        double completeness_delta, int threads,
                                        const Eigen::VectorXd& center_y,
                                        const Eigen::VectorXd& center_p) {
  if (n < 3) throw std::length_error("sample_moduli: requires n >= 3");
  if (count < 1) throw std::invalid_argument("sample_moduli: count >= 1");
  if (!(box.first < box.second)) throw std::invalid_argument("sample_moduli: degenerate box");
  if (!(T > 0.0)) throw std::invalid_argument("sample_moduli: T must be positive");
  if (center_y.size() != 0 && center_y.size() != n - 1)
    throw std::invalid_argument("sample_moduli: center_y dimension mismatch");
  if (center_p.size() != 0 && center_p.size() != n - 1)
    throw std::invalid_argument("sample_moduli: center_p dimension mismatch");

  std::vector<ModuliRecord> records(count);
  parallel_for_index(count, threads, [&](int idx) {
    SplitMix64 rng = sample_stream(seed, static_cast<std::uint64_t>(idx));
    const int d = n - 1;
    Eigen::VectorXd y0(d), p0(d);
    for (int j = 0; j < d; ++j)
      y0[j] = (center_y.size() ? center_y[j] : 0.0) + rng.uniform(box.first, box.second);
    for (int j = 0; j < d; ++j)
      p0[j] = (center_p.size() ? center_p[j] : 0.0) + rng.uniform(box.first, box.second);

    ModuliRecord rec;
    rec.index = idx;
    rec.y0 = y0;
    rec.p0 = p0;
    const PhaseState init(y0, p0);
    rec.s = scalar_invariant(init);
    const Trajectory traj = integrate(init, 0.0, {-T, T});
    const ClassificationReport cls = classify(traj, 0.0);
    rec.ricci_generic = cls.ricci_generic;
    rec.not_ricci_parallel = cls.not_ricci_parallel;
    rec.not_locally_reducible = cls.not_locally_reducible;
    rec.not_conformally_flat = cls.not_conformally_flat;
    rec.completeness = completeness_probe(traj, completeness_delta, T).flag;
    records[idx] = rec;
  });
  return records;
}

}  // namespace warpcurv
