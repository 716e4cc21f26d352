#include "warpcurv/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace warpcurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

Eigen::VectorXd permuted(const Eigen::VectorXd& v, const std::vector<int>& perm) {
  if (perm.empty()) return v;
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[perm[i]];
  return out;
}

bool is_bijection(const std::vector<int>& perm, int d) {
  if (static_cast<int>(perm.size()) != d) return false;
  std::vector<bool> seen(d, false);
  for (int v : perm) {
    if (v < 0 || v >= d || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

class IntegratedSource final : public StateSource {
 public:
  IntegratedSource(int d, std::vector<DenseSegment> segments, double lo, double hi,
                   EndpointStatus lo_status, EndpointStatus hi_status,
                   const Eigen::VectorXd& x_lo, const Eigen::VectorXd& x_hi)
      : d_(d),
        segs_(std::move(segments)),
        lo_(lo),
        hi_(hi),
        lo_status_(lo_status),
        hi_status_(hi_status),
        x_lo_(x_lo),
        x_hi_(x_hi) {
    std::sort(segs_.begin(), segs_.end(),
              [](const DenseSegment& a, const DenseSegment& b) { return a.lo() < b.lo(); });
    los_.reserve(segs_.size());
    for (const auto& s : segs_) los_.push_back(s.lo());
    prefix_ = Eigen::MatrixXd::Zero(d_, static_cast<Eigen::Index>(segs_.size()) + 1);
    for (std::size_t k = 0; k < segs_.size(); ++k)
      for (int c = 0; c < d_; ++c)
        prefix_(c, k + 1) = prefix_(c, k) + segs_[k].integral(c, segs_[k].lo(), segs_[k].hi());
  }

  int dim() const override { return d_; }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  EndpointStatus lo_status() const override { return lo_status_; }
  EndpointStatus hi_status() const override { return hi_status_; }
  std::pair<double, double> window() const override { return {lo_, hi_}; }

  PhaseState state(double t) const override {
    if (segs_.empty()) return PhaseState(x_lo_.head(d_), x_lo_.tail(d_));
    const Eigen::VectorXd x = segs_[locate(t)].value(t);
    return PhaseState(x.head(d_), x.tail(d_));
  }

  PhaseState state_derivative(double t) const override {
    if (segs_.empty()) return PhaseState(Eigen::VectorXd::Zero(d_), Eigen::VectorXd::Zero(d_));
    const Eigen::VectorXd v = segs_[locate(t)].derivative(t);
    return PhaseState(v.head(d_), v.tail(d_));
  }

  double y_integral(int comp, double a, double b) const override {
    if (a > b) return -y_integral(comp, b, a);
    if (segs_.empty() || a == b) return 0.0;
    const std::size_t ka = locate(a);
    const std::size_t kb = locate(b);
    if (ka == kb) return segs_[ka].integral(comp, a, b);
    double acc = segs_[ka].integral(comp, a, segs_[ka].hi());
    acc += prefix_(comp, kb) - prefix_(comp, ka + 1);
    acc += segs_[kb].integral(comp, segs_[kb].lo(), b);
    return acc;
  }

 private:
  std::size_t locate(double t) const {
    auto it = std::upper_bound(los_.begin(), los_.end(), t);
    const std::size_t idx = it == los_.begin() ? 0 : static_cast<std::size_t>(it - los_.begin() - 1);
    return std::min(idx, segs_.size() - 1);
  }

  int d_;
  std::vector<DenseSegment> segs_;
  std::vector<double> los_;
  double lo_, hi_;
  EndpointStatus lo_status_, hi_status_;
  Eigen::VectorXd x_lo_, x_hi_;
  Eigen::MatrixXd prefix_;
};

// y(t) = -2 a tanh(n (a t + b)) * identity, defined on all of R.
class TanhSource final : public StateSource {
 public:
  TanhSource(int n, double a, double b) : n_(n), d_(n - 1), a_(a), b_(b) {}

  int dim() const override { return d_; }
  double lo() const override { return -kInf; }
  double hi() const override { return kInf; }
  EndpointStatus lo_status() const override { return EndpointStatus::ReachedRequested; }
  EndpointStatus hi_status() const override { return EndpointStatus::ReachedRequested; }

  std::pair<double, double> window() const override {
    const double u = 40.0 / n_;
    const double t1 = (-u - b_) / a_;
    const double t2 = (u - b_) / a_;
    return {std::min(t1, t2), std::max(t1, t2)};
  }

  PhaseState state(double t) const override {
    const double u = n_ * (a_ * t + b_);
    const double sech2 = 1.0 / (std::cosh(u) * std::cosh(u));
    return PhaseState(Eigen::VectorXd::Constant(d_, -2.0 * a_ * std::tanh(u)),
                      Eigen::VectorXd::Constant(d_, -2.0 * a_ * a_ * n_ * sech2));
  }

  PhaseState state_derivative(double t) const override {
    const double u = n_ * (a_ * t + b_);
    const double sech2 = 1.0 / (std::cosh(u) * std::cosh(u));
    return PhaseState(
        Eigen::VectorXd::Constant(d_, -2.0 * a_ * a_ * n_ * sech2),
        Eigen::VectorXd::Constant(d_, 4.0 * a_ * a_ * a_ * n_ * n_ * std::tanh(u) * sech2));
  }

  double y_integral(int, double a, double b) const override {
    const double ua = n_ * (a_ * a + b_);
    const double ub = n_ * (a_ * b + b_);
    return (-2.0 / n_) * (log_cosh(ub) - log_cosh(ua));
  }

 private:
  int n_, d_;
  double a_, b_;
};

// y(t) = 2 a tan(n (a t + b)) * identity on the norm-capped part of the
// maximal interval; the endpoints stand in for the finite-time blow-up.
class TanSource final : public StateSource {
 public:
  TanSource(int n, double a, double b, double norm_cap) : n_(n), d_(n - 1), a_(a), b_(b) {
    const double s2 = norm_cap / (2.0 * a_ * a_ * n_);
    const double u_p = s2 <= 1.0 ? 0.0 : std::acos(std::min(1.0, std::sqrt(1.0 / s2)));
    const double u_y = std::atan(norm_cap / (2.0 * std::abs(a_)));
    u_max_ = std::min(u_p, u_y);
    const double t1 = (-u_max_ / n_ - b_) / a_;
    const double t2 = (u_max_ / n_ - b_) / a_;
    lo_ = std::min(t1, t2);
    hi_ = std::max(t1, t2);
  }

  int dim() const override { return d_; }
  double lo() const override { return lo_; }
  double hi() const override { return hi_; }
  EndpointStatus lo_status() const override { return EndpointStatus::BlowupDetected; }
  EndpointStatus hi_status() const override { return EndpointStatus::BlowupDetected; }
  std::pair<double, double> window() const override { return {lo_, hi_}; }

  PhaseState state(double t) const override {
    const double u = n_ * (a_ * t + b_);
    const double tan_u = std::tan(u);
    return PhaseState(Eigen::VectorXd::Constant(d_, 2.0 * a_ * tan_u),
                      Eigen::VectorXd::Constant(d_, 2.0 * a_ * a_ * n_ * (1.0 + tan_u * tan_u)));
  }

  PhaseState state_derivative(double t) const override {
    const double u = n_ * (a_ * t + b_);
    const double tan_u = std::tan(u);
    const double sec2 = 1.0 + tan_u * tan_u;
    return PhaseState(Eigen::VectorXd::Constant(d_, 2.0 * a_ * a_ * n_ * sec2),
                      Eigen::VectorXd::Constant(d_, 4.0 * a_ * a_ * a_ * n_ * n_ * tan_u * sec2));
  }

  double y_integral(int, double a, double b) const override {
    const double ua = n_ * (a_ * a + b_);
    const double ub = n_ * (a_ * b + b_);
    return (-2.0 / n_) * (std::log(std::cos(ub)) - std::log(std::cos(ua)));
  }

 private:
  int n_, d_;
  double a_, b_;
  double u_max_;
  double lo_, hi_;
};

class ExtendedSource final : public StateSource {
 public:
  ExtendedSource(std::shared_ptr<const StateSource> base, int extra)
      : base_(std::move(base)), extra_(extra), d_(base_->dim() + extra) {}

  int dim() const override { return d_; }
  double lo() const override { return base_->lo(); }
  double hi() const override { return base_->hi(); }
  EndpointStatus lo_status() const override { return base_->lo_status(); }
  EndpointStatus hi_status() const override { return base_->hi_status(); }
  std::pair<double, double> window() const override { return base_->window(); }

  PhaseState state(double t) const override { return extend(base_->state(t)); }
  PhaseState state_derivative(double t) const override {
    return extend(base_->state_derivative(t));
  }

  double y_integral(int comp, double a, double b) const override {
    return comp < base_->dim() ? base_->y_integral(comp, a, b) : 0.0;
  }

 private:
  PhaseState extend(const PhaseState& s) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(d_);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d_);
    y.head(base_->dim()) = s.y;
    p.head(base_->dim()) = s.p;
    return PhaseState(std::move(y), std::move(p));
  }

  std::shared_ptr<const StateSource> base_;
  int extra_;
  int d_;
};

// t -> eps * sigma(y)(b + eps t) with p transported by the chain rule.
class KTransformSource final : public StateSource {
 public:
  KTransformSource(std::shared_ptr<const StateSource> base, int sign, double shift,
                   std::vector<int> perm)
      : base_(std::move(base)), eps_(sign), b_(shift), perm_(std::move(perm)) {}

  int dim() const override { return base_->dim(); }
  double lo() const override { return eps_ > 0 ? base_->lo() - b_ : b_ - base_->hi(); }
  double hi() const override { return eps_ > 0 ? base_->hi() - b_ : b_ - base_->lo(); }
  EndpointStatus lo_status() const override {
    return eps_ > 0 ? base_->lo_status() : base_->hi_status();
  }
  EndpointStatus hi_status() const override {
    return eps_ > 0 ? base_->hi_status() : base_->lo_status();
  }

  std::pair<double, double> window() const override {
    const auto [wlo, whi] = base_->window();
    return eps_ > 0 ? std::make_pair(wlo - b_, whi - b_) : std::make_pair(b_ - whi, b_ - wlo);
  }

  PhaseState state(double t) const override {
    const PhaseState s = base_->state(b_ + eps_ * t);
    return PhaseState(eps_ * permuted(s.y, perm_), permuted(s.p, perm_));
  }

  PhaseState state_derivative(double t) const override {
    const PhaseState v = base_->state_derivative(b_ + eps_ * t);
    return PhaseState(permuted(v.y, perm_), eps_ * permuted(v.p, perm_));
  }

  double y_integral(int comp, double a, double b) const override {
    const int src = perm_.empty() ? comp : perm_[comp];
    return base_->y_integral(src, b_ + eps_ * a, b_ + eps_ * b);
  }

 private:
  std::shared_ptr<const StateSource> base_;
  int eps_;
  double b_;
  std::vector<int> perm_;
};

// t -> (a y(a t), a^2 p(a t)).
class ScalingSource final : public StateSource {
 public:
  ScalingSource(std::shared_ptr<const StateSource> base, double a)
      : base_(std::move(base)), a_(a) {}

  int dim() const override { return base_->dim(); }
  double lo() const override { return a_ > 0 ? base_->lo() / a_ : base_->hi() / a_; }
  double hi() const override { return a_ > 0 ? base_->hi() / a_ : base_->lo() / a_; }
  EndpointStatus lo_status() const override {
    return a_ > 0 ? base_->lo_status() : base_->hi_status();
  }
  EndpointStatus hi_status() const override {
    return a_ > 0 ? base_->hi_status() : base_->lo_status();
  }

  std::pair<double, double> window() const override {
    const auto [wlo, whi] = base_->window();
    const double t1 = wlo / a_, t2 = whi / a_;
    return {std::min(t1, t2), std::max(t1, t2)};
  }

  PhaseState state(double t) const override {
    const PhaseState s = base_->state(a_ * t);
    return PhaseState(a_ * s.y, a_ * a_ * s.p);
  }

  PhaseState state_derivative(double t) const override {
    const PhaseState v = base_->state_derivative(a_ * t);
    return PhaseState(a_ * a_ * v.y, a_ * a_ * a_ * v.p);
  }

  double y_integral(int comp, double a, double b) const override {
    return base_->y_integral(comp, a_ * a, a_ * b);
  }

 private:
  std::shared_ptr<const StateSource> base_;
  double a_;
};

class MomentumScaleSource final : public StateSource {
 public:
  MomentumScaleSource(std::shared_ptr<const StateSource> base, double factor)
      : base_(std::move(base)), f_(factor) {}

  int dim() const override { return base_->dim(); }
  double lo() const override { return base_->lo(); }
  double hi() const override { return base_->hi(); }
  EndpointStatus lo_status() const override { return base_->lo_status(); }
  EndpointStatus hi_status() const override { return base_->hi_status(); }
  std::pair<double, double> window() const override { return base_->window(); }

  PhaseState state(double t) const override {
    const PhaseState s = base_->state(t);
    return PhaseState(s.y, f_ * s.p);
  }

  PhaseState state_derivative(double t) const override {
    const PhaseState v = base_->state_derivative(t);
    return PhaseState(v.y, f_ * v.p);
  }

  double y_integral(int comp, double a, double b) const override {
    return base_->y_integral(comp, a, b);
  }

 private:
  std::shared_ptr<const StateSource> base_;
  double f_;
};

}  // namespace

Trajectory::Trajectory(std::shared_ptr<const StateSource> src, double t0)
    : src_(std::move(src)), t0_(t0) {
  if (!(t0 >= src_->lo() && t0 <= src_->hi()))
    throw std::invalid_argument("Trajectory: t0 outside domain");
  initial_ = src_->state(t0_);
  s0_ = scalar_invariant(initial_);
  max_s_drift_ = 0.0;
  const auto [lo, hi] = src_->window();
  const int samples = 257;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / (samples - 1);
    max_s_drift_ = std::max(max_s_drift_, std::abs(scalar_invariant(src_->state(t)) - s0_));
  }
}

PhaseState Trajectory::state(double t) const {
  const double lo = src_->lo(), hi = src_->hi();
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  if (t < lo - slack || t > hi + slack)
    throw std::domain_error("Trajectory::state: t outside [t_minus, t_plus]");
  return src_->state(std::clamp(t, lo, hi));
}

PhaseState Trajectory::state_derivative(double t) const {
  const double lo = src_->lo(), hi = src_->hi();
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  if (t < lo - slack || t > hi + slack)
    throw std::domain_error("Trajectory::state_derivative: t outside [t_minus, t_plus]");
  return src_->state_derivative(std::clamp(t, lo, hi));
}

double Trajectory::warp_integral(int comp, double from, double to) const {
  if (comp < 0 || comp >= dim()) throw std::invalid_argument("warp_integral: bad component");
  if (!contains(from) || !contains(to))
    throw std::domain_error("warp_integral: endpoint outside domain");
  return src_->y_integral(comp, from, to);
}

Trajectory integrate(const PhaseState& initial, double t0, std::pair<double, double> span,
                     double tol) {
  if (!(span.first < t0 && t0 < span.second))
    throw std::invalid_argument("integrate: span must contain t0 in its interior");
  if (!(tol > 0.0 && tol <= 1e-4))
    throw std::invalid_argument("integrate: tol must lie in (0, 1e-4]");

  const int d = initial.dim();
  const auto rhs = [d](double, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2 * d);
    out.head(d) = x.tail(d);
    out.tail(d) = shape_acceleration(x.head(d), x.tail(d));
    return out;
  };
  const auto rate = [d](double, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2 * d);
    out.head(d) = shape_acceleration(x.head(d), x.tail(d));
    out.tail(d) = shape_acceleration_rate(x.head(d), x.tail(d));
    return out;
  };

  OdeOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = tol;

  Eigen::VectorXd x0(2 * d);
  x0.head(d) = initial.y;
  x0.tail(d) = initial.p;

  MarchResult back = march(rhs, rate, t0, x0, span.first, opt);
  MarchResult fwd = march(rhs, rate, t0, x0, span.second, opt);
  if (!back.x_end.allFinite() || !fwd.x_end.allFinite())
    throw std::runtime_error("integrate: non-finite state produced");

  std::vector<DenseSegment> segments = std::move(back.segments);
  segments.insert(segments.end(), fwd.segments.begin(), fwd.segments.end());
  auto src = std::make_shared<IntegratedSource>(d, std::move(segments), back.t_end, fwd.t_end,
                                                back.outcome, fwd.outcome, back.x_end,
                                                fwd.x_end);
  return Trajectory(std::move(src), t0);
}

Trajectory explicit_solution(ExplicitKind kind, int n, double a, double b) {
  if (n < 2) throw std::invalid_argument("explicit_solution: n >= 2 required");
  if (a == 0.0) throw std::invalid_argument("explicit_solution: a must be nonzero");
  std::shared_ptr<const StateSource> src;
  if (kind == ExplicitKind::Tanh)
    src = std::make_shared<TanhSource>(n, a, b);
  else
    src = std::make_shared<TanSource>(n, a, b, OdeOptions{}.blowup_norm);
  return Trajectory(std::move(src), -b / a);
}

Trajectory trivial_extend(const Trajectory& traj, int m) {
  if (m < 1) throw std::invalid_argument("trivial_extend: m >= 1 required");
  return Trajectory(std::make_shared<ExtendedSource>(traj.source(), m), traj.t0());
}

SymmetryElement SymmetryElement::k_element(int sign, double shift, std::vector<int> perm) {
  SymmetryElement e;
  e.kind = Kind::KElement;
  e.sign = sign;
  e.shift = shift;
  e.perm = std::move(perm);
  return e;
}

SymmetryElement SymmetryElement::scaling(double factor) {
  SymmetryElement e;
  e.kind = Kind::Scaling;
  e.factor = factor;
  return e;
}

Trajectory apply_symmetry(const Trajectory& traj, const SymmetryElement& elem) {
  if (elem.kind == SymmetryElement::Kind::KElement) {
    if (elem.sign != 1 && elem.sign != -1)
      throw std::invalid_argument("apply_symmetry: sign must be +1 or -1");
    if (!elem.perm.empty() && !is_bijection(elem.perm, traj.dim()))
      throw std::invalid_argument("apply_symmetry: permutation does not match dimension");
    auto src = std::make_shared<KTransformSource>(traj.source(), elem.sign, elem.shift,
                                                  elem.perm);
    return Trajectory(std::move(src), elem.sign * (traj.t0() - elem.shift));
  }
  if (elem.factor == 0.0) throw std::invalid_argument("apply_symmetry: scaling factor is zero");
  auto src = std::make_shared<ScalingSource>(traj.source(), elem.factor);
  return Trajectory(std::move(src), traj.t0() / elem.factor);
}

Trajectory scale_momentum(const Trajectory& traj, double factor) {
  return Trajectory(std::make_shared<MomentumScaleSource>(traj.source(), factor), traj.t0());
}

namespace {

struct WitnessCandidate {
  int sign;
  double shift;
};

double transform_distance(const Trajectory& t1, const Trajectory& t2, int sign, double b,
                          const std::vector<int>& perm, int grid) {
  const auto [w1lo, w1hi] = t1.sample_window();
  const auto [w2lo, w2hi] = t2.sample_window();
  double lo, hi;
  if (sign > 0) {
    lo = std::max(w2lo, w1lo - b);
    hi = std::min(w2hi, w1hi - b);
  } else {
    lo = std::max(w2lo, b - w1hi);
    hi = std::min(w2hi, b - w1lo);
  }
  const double need = 0.3 * std::min(w1hi - w1lo, w2hi - w2lo);
  if (!(hi - lo >= need)) return kInf;
  double dist = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t = lo + (hi - lo) * i / (grid - 1);
    const Eigen::VectorXd lhs = sign * permuted(t1.state(b + sign * t).y, perm);
    dist = std::max(dist, (lhs - t2.state(t).y).lpNorm<Eigen::Infinity>());
    if (!(dist < kInf)) return kInf;
  }
  return dist;
}

double golden_refine(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace

std::optional<SymmetryElement> k_equivalent(const Trajectory& t1, const Trajectory& t2,
                                            double tol) {
  if (t1.dim() != t2.dim()) throw std::invalid_argument("k_equivalent: dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("k_equivalent: tol must be positive");
  if (t1.n() >= 9) throw std::length_error("k_equivalent: permutation search refuses n >= 9");
  const int d = t1.dim();

  const auto [w1lo, w1hi] = t1.sample_window();
  const auto [w2lo, w2hi] = t2.sample_window();
  const int kScan = 129;
  std::vector<double> ts1(kScan), tr1(kScan);
  double scale = 1.0;
  for (int i = 0; i < kScan; ++i) {
    ts1[i] = w1lo + (w1hi - w1lo) * i / (kScan - 1);
    const Eigen::VectorXd y = t1.state(ts1[i]).y;
    tr1[i] = y.sum();
    scale = std::max(scale, y.lpNorm<Eigen::Infinity>());
  }
  for (int i = 0; i < kScan; ++i) {
    const double t = w2lo + (w2hi - w2lo) * i / (kScan - 1);
    scale = std::max(scale, t2.state(t).y.lpNorm<Eigen::Infinity>());
  }

  // s is invariant under the searched group; a mismatch rules equivalence out.
  const double s_slack =
      1e-6 * (1.0 + std::abs(t1.s0()) + std::abs(t2.s0())) + t1.max_s_drift() + t2.max_s_drift();
  if (std::abs(t1.s0() - t2.s0()) > s_slack) return std::nullopt;

  const double m2 = 0.5 * (w2lo + w2hi);
  const double target_base = t2.state(m2).y.sum();

  std::vector<WitnessCandidate> candidates;
  candidates.push_back({+1, 0.0});
  for (int sign : {+1, -1}) {
    const double target = sign * target_base;
    bool found = false;
    for (int i = 0; i + 1 < kScan && candidates.size() < 256; ++i) {
      const double f0 = tr1[i] - target;
      const double f1 = tr1[i + 1] - target;
      if (f0 == 0.0) {
        candidates.push_back({sign, ts1[i] - sign * m2});
        found = true;
      } else if (f0 * f1 < 0.0) {
        double a = ts1[i], b = ts1[i + 1], fa = f0;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = t1.state(mid).y.sum() - target;
          if (fa * fm <= 0.0)
            b = mid;
          else {
            a = mid;
            fa = fm;
          }
        }
        candidates.push_back({sign, 0.5 * (a + b) - sign * m2});
        found = true;
      }
    }
    if (!found) {
      // No level crossing (flat trace); fall back to a coarse shift grid.
      const double blo = sign > 0 ? w1lo - w2hi : w1lo + w2lo;
      const double bhi = sign > 0 ? w1hi - w2lo : w1hi + w2hi;
      for (int i = 0; i < 25; ++i) candidates.push_back({sign, blo + (bhi - blo) * i / 24.0});
    }
  }

  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  const double width2 = w2hi - w2lo;
  do {
    for (const auto& cand : candidates) {
      const double coarse = transform_distance(t1, t2, cand.sign, cand.shift, perm, 33);
      if (!(coarse < std::max(100.0 * tol * scale, 1e-3 * scale))) continue;
      const double delta = std::max(1e-4 * width2, 1e-9);
      const auto dist_at = [&](double b) {
        return transform_distance(t1, t2, cand.sign, b, perm, 33);
      };
      const double b_ref = golden_refine(dist_at, cand.shift - delta, cand.shift + delta, 60);
      const double b_best = dist_at(b_ref) <= coarse ? b_ref : cand.shift;
      if (transform_distance(t1, t2, cand.sign, b_best, perm, 129) < tol * scale)
        return SymmetryElement::k_element(cand.sign, b_best, perm);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  return std::nullopt;
}

double invariant_drift(const Trajectory& traj, int samples) {
  if (samples < 2) throw std::invalid_argument("invariant_drift: samples >= 2 required");
  const auto [lo, hi] = traj.sample_window();
  double drift = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / (samples - 1);
    drift = std::max(drift, std::abs(scalar_invariant(traj.state(t)) - traj.s0()));
  }
  return drift;
}

double relative_invariant_drift(const Trajectory& traj, int samples) {
  if (samples < 2) throw std::invalid_argument("relative_invariant_drift: samples >= 2");
  const auto [lo, hi] = traj.sample_window();
  double drift = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / (samples - 1);
    const PhaseState s = traj.state(t);
    const double tr_y = s.y.sum();
    const double local =
        2.0 * std::abs(s.p.sum()) + s.y.squaredNorm() + tr_y * tr_y;
    const double denom = std::max({1.0, std::abs(traj.s0()), local});
    drift = std::max(drift, std::abs(scalar_invariant(s) - traj.s0()) / denom);
  }
  return drift;
}

double ode_residual(const Trajectory& traj, int samples) {
  if (samples < 2) throw std::invalid_argument("ode_residual: samples >= 2 required");
  const auto [lo, hi] = traj.sample_window();
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / (samples - 1);
    const PhaseState s = traj.state(t);
    const PhaseState v = traj.state_derivative(t);
    const Diag g = shape_acceleration(s.y, s.p);
    const double num = std::max((v.y - s.p).lpNorm<Eigen::Infinity>(),
                                (v.p - g).lpNorm<Eigen::Infinity>());
    const double scale = std::max({1.0, s.y.lpNorm<Eigen::Infinity>(),
                                   s.p.lpNorm<Eigen::Infinity>(),
                                   g.lpNorm<Eigen::Infinity>()});
    worst = std::max(worst, num / scale);
  }
  return worst;
}

}  // namespace warpcurv
