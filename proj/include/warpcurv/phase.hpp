#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "warpcurv/construction.hpp"
#include "warpcurv/core.hpp"
#include "warpcurv/flow.hpp"

namespace warpcurv {

/// Linearization of the phase field at the zero q * (identity, 0):
/// (yhat, phat) -> (phat, n q phat + q^2 tr(yhat) * identity - (n-1) q^2 yhat).
/// For q != 0 the spectrum is {0, nq} with multiplicity 1 each and
/// {(n-1)q, q} with multiplicity n-2 each.
struct LinearizationReport {
  double q = 0.0;
  int n = 0;
  Eigen::MatrixXd matrix;         // 2(n-1) x 2(n-1)
  Eigen::VectorXd eigenvalues;    // sorted ascending
  Eigen::VectorXd expected;       // sorted ascending
  double spectrum_mismatch = 0.0; // max sorted gap
  double eigenspace_residual = 0.0;
};

LinearizationReport linearize_zero(double q, int n);

/// F_c(y, p) = (c y, c^2 p); conjugates the flow up to the time change t -> ct
/// and multiplies the scalar invariant by c^2. Group law: F_c o F_d = F_{cd}.
PhaseState scaling_map(const PhaseState& state, double c);

struct BasinSample {
  int index = 0;
  bool reached_minus = false;
  bool reached_plus = false;
  double err_minus = 0.0;  // ||y(-T) - 2|a| * identity||_inf
  double err_plus = 0.0;   // ||y(+T) + 2|a| * identity||_inf
  CompletenessFlag completeness = CompletenessFlag::Inconclusive;
  double s = 0.0;
  bool ok = false;
};

struct BasinReport {
  int n = 0;
  double xi = 0.0, zeta = 0.0, epsilon = 0.0;
  int count = 0;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  double pass_tol = 0.0;
  double a_abs = 0.0;  // |a| of the identity-multiple solution through (xi, -zeta)
  std::vector<BasinSample> samples;
  bool all_ok = false;
};

/// Integrates `count` initial states within sup-radius epsilon of
/// (xi * identity, -zeta * identity) to |t| = horizon and records whether each
/// reaches the horizon with terminal y within pass_tol of the predicted
/// limits -+ 2|a| * identity.
BasinReport basin_experiment(int n, double xi, double zeta, double epsilon, int count,
                             std::uint64_t seed, double horizon = 20.0,
                             double pass_tol = 1e-2, double tol = 1e-10, int threads = 0);

struct BlowupSample {
  int index = 0;
  Eigen::VectorXd y0, p0;
  double s = 0.0;
  bool finite_minus = false;
  bool finite_plus = false;
  double t_minus = 0.0;
  double t_plus = 0.0;
};

struct BlowupReport {
  int n = 0;
  int count = 0;
  std::uint64_t seed = 0;
  double t_max = 0.0;
  std::vector<BlowupSample> samples;
  bool all_finite_side = false;
};

/// Draws nonzero states with |tr y| >= 1, shifts p so the scalar invariant is
/// nonnegative, and checks that every trajectory leaves through a finite-time
/// endpoint on at least one side within |t| <= t_max.
BlowupReport blowup_experiment(int n, int count, std::uint64_t seed, double t_max = 50.0,
                               double tol = 1e-10, int threads = 0);

}  // namespace warpcurv
