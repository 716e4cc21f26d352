#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "warpcurv/core.hpp"
#include "warpcurv/ode.hpp"

namespace warpcurv {

/// Backing evaluator of a solution curve t -> (y(t), p(t)). Sources are
/// immutable once built and safe to share across threads.
class StateSource {
 public:
  virtual ~StateSource() = default;
  virtual int dim() const = 0;
  virtual double lo() const = 0;  // -inf allowed
  virtual double hi() const = 0;  // +inf allowed
  virtual EndpointStatus lo_status() const = 0;
  virtual EndpointStatus hi_status() const = 0;
  /// Finite subinterval of [lo, hi] that carries all the variation; equals
  /// the domain when that is finite.
  virtual std::pair<double, double> window() const = 0;
  virtual PhaseState state(double t) const = 0;
  /// Derivative (dy/dt, dp/dt) of the represented curve.
  virtual PhaseState state_derivative(double t) const = 0;
  /// Integral of y_comp over [a, b] (sign-sensitive).
  virtual double y_integral(int comp, double a, double b) const = 0;
};

/// A maximal-or-truncated solution with dense evaluation on [t_minus, t_plus].
class Trajectory {
 public:
  Trajectory(std::shared_ptr<const StateSource> src, double t0);

  int dim() const { return src_->dim(); }
  int n() const { return src_->dim() + 1; }
  double t0() const { return t0_; }
  const PhaseState& initial() const { return initial_; }
  double t_minus() const { return src_->lo(); }
  double t_plus() const { return src_->hi(); }
  EndpointStatus status_minus() const { return src_->lo_status(); }
  EndpointStatus status_plus() const { return src_->hi_status(); }
  std::pair<double, double> sample_window() const { return src_->window(); }
  bool contains(double t) const { return t >= src_->lo() && t <= src_->hi(); }

  PhaseState state(double t) const;
  PhaseState state_derivative(double t) const;

  double s0() const { return s0_; }
  double max_s_drift() const { return max_s_drift_; }

  /// Integral of y_comp from `from` to `to`.
  double warp_integral(int comp, double from, double to) const;
  /// Integral of y_comp from t0 to t.
  double warp_integral(int comp, double t) const { return warp_integral(comp, t0_, t); }

  const std::shared_ptr<const StateSource>& source() const { return src_; }

 private:
  std::shared_ptr<const StateSource> src_;
  double t0_;
  PhaseState initial_;
  double s0_;
  double max_s_drift_;
};

/// Integrates the first-order system from `initial` at t0 across `span`
/// (t0 strictly inside). Each direction marches until the span endpoint, a
/// blow-up threshold, or step underflow.
Trajectory integrate(const PhaseState& initial, double t0, std::pair<double, double> span,
                     double tol = 1e-10);

enum class ExplicitKind { Tanh, Tan };

/// Closed-form identity-multiple solutions y(t) = a y1(a t + b) * identity
/// with y1(u) = -2 tanh(n u) on all of R, or y1(u) = 2 tan(n u) on the
/// preimage of (-pi/(2n), pi/(2n)). The evaluators are exact.
Trajectory explicit_solution(ExplicitKind kind, int n, double a, double b);

/// Appends m zero components to y and p; the result solves the same equation.
Trajectory trivial_extend(const Trajectory& traj, int m);

/// Element of the solution-set symmetry group: either a time shift/reflection
/// combined with a component permutation, or the scaling y -> a y(a t).
struct SymmetryElement {
  enum class Kind { KElement, Scaling };
  Kind kind = Kind::KElement;
  int sign = 1;            // epsilon = +1 or -1          (KElement)
  double shift = 0.0;      // b                           (KElement)
  std::vector<int> perm;   // new comp i = old perm[i]; empty = identity
  double factor = 1.0;     // a != 0                      (Scaling)

  static SymmetryElement k_element(int sign, double shift, std::vector<int> perm = {});
  static SymmetryElement scaling(double factor);
};

/// KElement: t -> eps * sigma(y)(b + eps t), p by the chain rule.
/// Scaling:  t -> a y(a t), p -> a^2 p(a t).
Trajectory apply_symmetry(const Trajectory& traj, const SymmetryElement& elem);

/// Diagnostic control: scales the p component only, leaving y and its actual
/// derivative untouched, so the result is off-solution for factor != 1.
Trajectory scale_momentum(const Trajectory& traj, double factor);

/// Witness search over sign, permutations and shift: returns an element
/// mapping t1 onto t2 within tol * scale in sup norm, or nothing.
/// Refuses n >= 9 (factorial search bound) with std::length_error.
std::optional<SymmetryElement> k_equivalent(const Trajectory& t1, const Trajectory& t2,
                                            double tol);

/// Max over uniform samples of |s(t) - s0|.
double invariant_drift(const Trajectory& traj, int samples);

/// Same, but each deviation is scaled by max(1, |s0|, local term magnitude),
/// so conditioning near blow-up does not mask conservation.
double relative_invariant_drift(const Trajectory& traj, int samples);

/// Max over uniform samples of the first-order-system residual of the dense
/// interpolant, scaled by max(1, ||x||_inf, ||v(x)||_inf).
double ode_residual(const Trajectory& traj, int samples);

}  // namespace warpcurv
