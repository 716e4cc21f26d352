#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace warpcurv {

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

enum class EndpointStatus { ReachedRequested, BlowupDetected, StepUnderflow };

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double blowup_norm = 1e8;        // stop once ||x||_inf exceeds this
  double min_step_scale = 1e-13;   // underflow when |h| < min_step_scale * max(1, |t|)
  long max_steps = 4000000;
};

/// One dense-output piece: x(t) = sum_k coeff.col(k) theta^k with
/// theta = (t - t_start) / width in [0, 1]. `width` is signed.
struct DenseSegment {
  double t_start = 0.0;
  double width = 0.0;
  Eigen::MatrixXd coeff;  // dim x 6

  double lo() const { return width >= 0 ? t_start : t_start + width; }
  double hi() const { return width >= 0 ? t_start + width : t_start; }
  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd derivative(double t) const;
  /// Integral of component i over [a, b], both inside the segment.
  double integral(int i, double a, double b) const;
};

/// Quintic two-point interpolant matching value, first and second derivative
/// at both endpoints.
DenseSegment hermite_quintic(double t0, double t1, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& f0, const Eigen::VectorXd& a0,
                             const Eigen::VectorXd& x1, const Eigen::VectorXd& f1,
                             const Eigen::VectorXd& a1);

struct MarchResult {
  std::vector<DenseSegment> segments;  // in march order
  EndpointStatus outcome = EndpointStatus::ReachedRequested;
  double t_end = 0.0;
  Eigen::VectorXd x_end;
};

/// Adaptive Dormand-Prince 5(4) march from t0 toward t_target. `rhs_rate`
/// must return the total time derivative of `rhs` along the flow; both feed
/// the quintic dense output, which therefore has an O(h^5) derivative
/// residual independent of the step controller.
MarchResult march(const OdeRhs& rhs, const OdeRhs& rhs_rate, double t0,
                  const Eigen::VectorXd& x0, double t_target, const OdeOptions& opt = {});

}  // namespace warpcurv
