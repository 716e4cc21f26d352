#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "warpcurv/flow.hpp"
#include "warpcurv/tensor.hpp"

namespace warpcurv {

/// Diagonal chart metric generated by a trajectory: g_11 = 1 and
/// g_jj(t) = g0_j exp(-2 int_{t0}^{t} y_j), so that dg_jj/dt = -2 y_j g_jj.
/// Fiber component j labels coordinate x^(j+2); all indices here are 0-based.
class WarpChart {
 public:
  WarpChart(Trajectory traj, Eigen::VectorXd g0, double t0);

  const Trajectory& trajectory() const { return traj_; }
  const Eigen::VectorXd& g0() const { return g0_; }
  double anchor() const { return t0_; }
  int n() const { return traj_.n(); }
  int fibers() const { return traj_.dim(); }

  double warp(int comp, double t) const;
  double warp_dt(int comp, double t) const;
  double warp_dtt(int comp, double t) const;

  /// Full n-dimensional chart with analytic derivatives.
  MetricChart metric_chart() const;
  /// Chart spanned by (t, x^2, ..., x^(keep+1)); analytic.
  MetricChart base_slice_chart(int keep) const;
  /// sqrt(g_jj) as a scalar field in the first coordinate of a chart of
  /// dimension field_dim (all other partials vanish).
  ScalarField warp_sqrt_field(int comp, int field_dim) const;

 private:
  Trajectory traj_;
  Eigen::VectorXd g0_;
  double t0_;
};

WarpChart build_metric(const Trajectory& traj, const Eigen::VectorXd& g0, double t0);

/// Residual of the governing second-order equation at one point, written
/// through the Ricci-eigenvalue rates: r_j = dmu_j/dt - y_j (mu_j - mu_1),
/// with the eigenvalue rate taken from the supplied second derivative.
/// Vanishes exactly when (y, p, yddot) satisfies the shape equation.
Eigen::VectorXd harmonic_residual(const PhaseState& state, const Diag& yddot);

/// Same residual along a chart's trajectory, with yddot taken from the
/// interpolant derivative; discriminates corrupted trajectory data.
Eigen::VectorXd harmonic_residual(const WarpChart& chart, double t);

/// Normalized sectional Weyl component over the plane of fiber coordinates
/// j and k (0-based fiber labels):
///   (n-1)(n-2) g^jj g^kk W_jkjk
///     = 2 tr p - tr y^2 - (tr y)^2
///       + (n-1)[(y_j + y_k) tr y - (n-2) y_j y_k - p_j - p_k].
/// Identically zero for n = 3 and on identity-multiple states.
double weyl_sectional(const PhaseState& state, int fiber_j, int fiber_k);
double weyl_sectional(const WarpChart& chart, double t, int fiber_j, int fiber_k);

enum class CompletenessFlag { NumericallyComplete, Inconclusive, DomainFinite };

struct CompletenessReport {
  CompletenessFlag flag = CompletenessFlag::Inconclusive;
  bool reached_minus = false;
  bool reached_plus = false;
  double margin_minus = 0.0;  // min over samples of min_j (+y_j) near t = -T
  double margin_plus = 0.0;   // min over samples of min_j (-y_j) near t = +T
};

/// Sufficient-condition probe: NumericallyComplete when the domain covers
/// [-T, T] and -+ y_j >= delta on the outer halves [T/2, T]. A flat solution
/// fails the strict sign test and reads Inconclusive; the probe is one-sided
/// evidence, never a completeness decision.
CompletenessReport completeness_probe(const Trajectory& traj, double delta, double T,
                                      int samples = 64);

struct ClassificationReport {
  bool ricci_generic = false;
  bool not_ricci_parallel = false;
  bool not_locally_reducible = false;
  bool not_conformally_flat = false;  // always false at n = 3
  double probe_time = 0.0;
  double s = 0.0;
};

/// Open-condition certificates at t_probe (genericity sampled along the whole
/// domain); requires n >= 3.
ClassificationReport classify(const Trajectory& traj, double t_probe, double rel_tol = 1e-8);

struct ModuliRecord {
  int index = 0;
  Eigen::VectorXd y0, p0;
  double s = 0.0;
  bool ricci_generic = false;
  CompletenessFlag completeness = CompletenessFlag::Inconclusive;
  bool not_ricci_parallel = false;
  bool not_locally_reducible = false;
  bool not_conformally_flat = false;
};

/// Draws (y0, p0) uniformly from center + box^(2(n-1)), integrates over
/// [-T, T], and classifies each sample. Deterministic under (seed, index)
/// streams. Empty centers mean the origin.
std::vector<ModuliRecord> sample_moduli(int n, int count, std::pair<double, double> box,
                                        std::uint64_t seed, double T = 20.0,
                                        double completeness_delta = 0.05, int threads = 0,
                                        const Eigen::VectorXd& center_y = {},
                                        const Eigen::VectorXd& center_p = {});

}  // namespace warpcurv
