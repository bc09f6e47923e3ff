#include "isofree/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isofree/error.hpp"
#include "isofree/numerics.hpp"

namespace isofree {

StateSpace StateSpace::product(std::vector<SpinAtom> atoms) {
  if (atoms.size() < 2) fail(ErrorCode::InvalidStateSpace, "product space needs at least two atoms");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double d = 0.0;
  for (const auto& atom : atoms) {
    if (!std::isfinite(atom.value) || !std::isfinite(atom.mass) || !(atom.mass > 0.0)) {
      fail(ErrorCode::InvalidStateSpace, "atoms need finite values and positive masses");
    }
    lo = std::min(lo, atom.value);
    hi = std::max(hi, atom.value);
    d = std::max(d, atom.value * atom.value);
  }
  if (!(lo < 0.0 && hi > 0.0)) {
    fail(ErrorCode::InvalidStateSpace, "origin must lie inside the convex hull of the support");
  }
  return StateSpace(ProductSpace{std::move(atoms)}, d);
}

StateSpace StateSpace::hypercube() { return product({{-1.0, 0.5}, {1.0, 0.5}}); }

StateSpace StateSpace::ball(double radius, double h1, double h2) {
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::InvalidStateSpace, "L must be positive");
  if (!std::isfinite(h1) || !std::isfinite(h2) || h2 < 0.0) {
    fail(ErrorCode::InvalidStateSpace, "h1 must be finite and h2 >= 0");
  }
  return StateSpace(BallSpace{radius, h1, h2}, radius * radius);
}

const ProductSpace& StateSpace::as_product() const {
  if (!is_product()) fail(ErrorCode::BallVariantUnsupported, "operation requires a product space");
  return std::get<ProductSpace>(variant_);
}

const BallSpace& StateSpace::as_ball() const {
  if (is_product()) fail(ErrorCode::InvalidStateSpace, "operation requires the ball state space");
  return std::get<BallSpace>(variant_);
}

double StateSpace::min_square() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& atom : as_product().atoms) lo = std::min(lo, atom.value * atom.value);
  return lo;
}

double StateSpace::log_total_mass() const {
  double total = 0.0;
  for (const auto& atom : as_product().atoms) total += atom.mass;
  return std::log(total);
}

bool StateSpace::single_norm() const {
  if (!is_product()) return false;
  return min_square() == effective_size_;
}

DiscreteOrderParameter DiscreteOrderParameter::check(double r, std::vector<double> q,
                                                     std::vector<double> x, bool strict) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::OutOfRange, "r must be positive");
  if (q.size() != x.size()) fail(ErrorCode::InvalidArgument, "q and x must have equal length");
  for (std::size_t k = 0; k < q.size(); ++k) {
    const bool q_ok = strict ? (q[k] > 0.0 && q[k] < r) : (q[k] >= 0.0 && q[k] < r);
    if (!q_ok || !std::isfinite(q[k])) {
      fail(ErrorCode::OutOfRange, "q[" + std::to_string(k) + "] outside (0, r)");
    }
    if (!(x[k] > 0.0 && x[k] < 1.0)) {
      fail(ErrorCode::OutOfRange, "x[" + std::to_string(k) + "] outside (0, 1)");
    }
    if (k > 0) {
      const bool increasing = strict ? (q[k] > q[k - 1] && x[k] > x[k - 1])
                                     : (q[k] >= q[k - 1] && x[k] >= x[k - 1]);
      if (!increasing) {
        fail(ErrorCode::NotStrictlyIncreasing, "order parameter sequences must increase");
      }
    }
  }
  return DiscreteOrderParameter(r, std::move(q), std::move(x));
}

DiscreteOrderParameter DiscreteOrderParameter::validate(double r, std::vector<double> q,
                                                        std::vector<double> x) {
  return check(r, std::move(q), std::move(x), true);
}

DiscreteOrderParameter DiscreteOrderParameter::weak(double r, std::vector<double> q,
                                                    std::vector<double> x) {
  return check(r, std::move(q), std::move(x), false);
}

double DiscreteOrderParameter::q_at(std::size_t k) const {
  if (k == 0) return 0.0;
  if (k > q_.size()) return r_;
  return q_[k - 1];
}

double DiscreteOrderParameter::x_at(std::size_t k) const {
  if (k == 0) return 0.0;
  if (k > x_.size()) return 1.0;
  return x_[k - 1];
}

BoundaryCondition::BoundaryCondition(const StateSpace& space, double beta, double lambda)
    : beta_(beta), lambda_(lambda) {
  const auto& atoms = space.as_product().atoms;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& atom : atoms) {
    const double slope = beta * atom.value;
    const double intercept = lambda * atom.value * atom.value + std::log(atom.mass);
    auto same = std::find_if(lines_.begin(), lines_.end(),
                             [&](const Line& l) { return l.slope == slope; });
    if (same != lines_.end()) {
      same->intercept = numerics::log_add(same->intercept, intercept);
    } else {
      lines_.push_back({slope, intercept});
    }
    lo = std::min(lo, atom.value);
    hi = std::max(hi, atom.value);
    slope_bound_ = std::max(slope_bound_, std::abs(slope));
  }
  slope_span_ = std::abs(beta) * (hi - lo);
  std::sort(lines_.begin(), lines_.end(), [](const Line& a, const Line& b) { return a.slope < b.slope; });

  // Beyond the onset every subdominant line sits 40 nats below the asymptote.
  constexpr double kGap = 40.0;
  const Line& top = lines_.back();
  const Line& bottom = lines_.front();
  double right_onset = 0.0, left_onset = 0.0;
  for (std::size_t i = 0; i + 1 < lines_.size(); ++i) {
    const Line& l = lines_[i];
    right_onset = std::max(right_onset, (l.intercept - top.intercept + kGap) / (top.slope - l.slope));
  }
  for (std::size_t i = 1; i < lines_.size(); ++i) {
    const Line& l = lines_[i];
    left_onset = std::max(left_onset, (l.intercept - bottom.intercept + kGap) / (l.slope - bottom.slope));
  }
  right_ = {top.slope, top.intercept, right_onset};
  left_ = {bottom.slope, bottom.intercept, left_onset};
}

double BoundaryCondition::operator()(double y) const {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& l : lines_) peak = std::max(peak, l.slope * y + l.intercept);
  double sum = 0.0;
  for (const auto& l : lines_) sum += std::exp(l.slope * y + l.intercept - peak);
  return peak + std::log(sum);
}

double BoundaryCondition::derivative(double y) const {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& l : lines_) peak = std::max(peak, l.slope * y + l.intercept);
  double sum = 0.0, weighted = 0.0;
  for (const auto& l : lines_) {
    const double w = std::exp(l.slope * y + l.intercept - peak);
    sum += w;
    weighted += w * l.slope;
  }
  return weighted / sum;
}

double boundary_g(const StateSpace& space, double beta, double lambda, double y) {
  return BoundaryCondition(space, beta, lambda)(y);
}

double theta_stieltjes_sum(const DiscreteOrderParameter& op, const Correlator& c, double M) {
  const std::size_t n = op.levels();
  double sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double upper = c.theta(op.r(), M, op.q_at(k + 1));
    const double lower = c.theta(op.r(), M, op.q_at(k));
    sum += op.x_at(k) * (upper - lower);
  }
  return sum;
}

}  // namespace isofree
