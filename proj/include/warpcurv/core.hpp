#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace warpcurv {

/// Entries of a diagonal matrix diag(y_2, ..., y_n); length n - 1.
using Diag = Eigen::VectorXd;

/// Point (y, p) of the first-order phase space E x E, with p = dy/dt.
struct PhaseState {
  Diag y;
  Diag p;

  PhaseState() = default;
  PhaseState(Diag y_in, Diag p_in) : y(std::move(y_in)), p(std::move(p_in)) {
    if (y.size() < 1 || y.size() != p.size())
      throw std::invalid_argument("PhaseState: y and p must have equal length >= 1");
    if (!y.allFinite() || !p.allFinite())
      throw std::invalid_argument("PhaseState: entries must be finite");
  }

  int dim() const { return static_cast<int>(y.size()); }
  int n() const { return dim() + 1; }
};

/// Acceleration of the second-order shape equation,
///   G(y, p) = (tr y + y) p + (tr y^2) y - (tr y) y^2,
/// with entrywise diagonal products; a trace added to a diagonal matrix acts
/// as that multiple of the identity.
template <typename DY, typename DP>
Diag shape_acceleration(const Eigen::MatrixBase<DY>& y, const Eigen::MatrixBase<DP>& p) {
  const double tr_y = y.sum();
  const double tr_y2 = y.squaredNorm();
  return ((tr_y + y.array()) * p.array() + tr_y2 * y.array() - tr_y * y.array().square())
      .matrix();
}

/// Total time derivative of shape_acceleration along the flow (ydot = p, pdot = G).
template <typename DY, typename DP>
Diag shape_acceleration_rate(const Eigen::MatrixBase<DY>& y, const Eigen::MatrixBase<DP>& p) {
  const double tr_y = y.sum();
  const double tr_p = p.sum();
  const double tr_y2 = y.squaredNorm();
  const double tr_y2_rate = 2.0 * y.dot(p);
  const Diag g = shape_acceleration(y, p);
  return ((tr_p + p.array()) * p.array() + (tr_y + y.array()) * g.array() +
          tr_y2_rate * y.array() + tr_y2 * p.array() - tr_p * y.array().square() -
          2.0 * tr_y * y.array() * p.array())
      .matrix();
}

/// First-order phase-space vector field (y, p) -> (p, G(y, p)).
inline PhaseState phase_vector_field(const PhaseState& state) {
  return PhaseState(state.p, shape_acceleration(state.y, state.p));
}

/// Conserved scalar s = 2 tr p - tr y^2 - (tr y)^2.
inline double scalar_invariant(const PhaseState& state) {
  const double tr_y = state.y.sum();
  return 2.0 * state.p.sum() - state.y.squaredNorm() - tr_y * tr_y;
}

/// Ricci eigenvalues (mu_1, ..., mu_n) of the metric generated by (y, p):
/// mu_1 = tr p - tr y^2 and mu_j = p_j - y_j tr y for j >= 2.
/// Their sum equals scalar_invariant.
inline Eigen::VectorXd ricci_eigenvalues(const PhaseState& state) {
  const double tr_y = state.y.sum();
  Eigen::VectorXd mu(state.n());
  mu(0) = state.p.sum() - state.y.squaredNorm();
  mu.tail(state.dim()) = state.p - tr_y * state.y;
  return mu;
}

inline constexpr double kGenericityTol = 1e-8;

/// True when all Ricci eigenvalues are pairwise separated by more than
/// tol * max(1, max_k |mu_k|).
inline bool is_ricci_generic(const PhaseState& state, double tol = kGenericityTol) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_ricci_generic: tolerance must be positive");
  const Eigen::VectorXd mu = ricci_eigenvalues(state);
  const double scale = std::max(1.0, mu.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = i + 1; j < mu.size(); ++j)
      if (std::abs(mu(i) - mu(j)) <= tol * scale) return false;
  return true;
}

}  // namespace warpcurv
