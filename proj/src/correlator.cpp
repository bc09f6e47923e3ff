#include "isofree/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isofree/error.hpp"

namespace isofree {

namespace {

double factorial(int p) {
  double value = 1.0;
  for (int k = 2; k <= p; ++k) value *= k;
  return value;
}

}  // namespace

Correlator::Correlator(CorrelatorSpec spec) : spec_(std::move(spec)) {
  if (!std::isfinite(spec_.slope) || !std::isfinite(spec_.constant)) {
    fail(ErrorCode::InvalidArgument, "correlator parameters must be finite");
  }
  for (std::size_t i = 0; i < spec_.atoms.size(); ++i) {
    const auto& atom = spec_.atoms[i];
    if (!std::isfinite(atom.weight) || !(atom.weight > 0.0)) {
      throw Error(ErrorCode::NonpositiveWeight, "atom weight must be positive",
                  "atoms[" + std::to_string(i) + "].w");
    }
    if (!std::isfinite(atom.rate) || !(atom.rate > 0.0)) {
      throw Error(ErrorCode::NonpositiveRate, "atom rate must be positive",
                  "atoms[" + std::to_string(i) + "].t");
    }
  }
  std::stable_sort(spec_.atoms.begin(), spec_.atoms.end(),
                   [](const MixtureAtom& a, const MixtureAtom& b) { return a.rate < b.rate; });
  for (std::size_t i = 1; i < spec_.atoms.size(); ++i) {
    if (spec_.atoms[i].rate == spec_.atoms[i - 1].rate) {
      fail(ErrorCode::DuplicateRate, "atom rates must be distinct");
    }
  }

  if (spec_.kind == CorrelatorKind::LongRange) {
    if (spec_.slope < 0.0) throw Error(ErrorCode::NegativeSlope, "slope A must be >= 0", "A");
    // Integrability of t^2/(t^2+1) against the mixing measure.
    double integral = 0.0;
    for (const auto& atom : spec_.atoms) {
      integral += atom.weight * atom.rate * atom.rate / (atom.rate * atom.rate + 1.0);
    }
    if (!std::isfinite(integral)) fail(ErrorCode::InvalidArgument, "mixing measure not integrable");
    slope_ = spec_.slope;
    d_atoms_ = spec_.atoms;
  } else {
    if (spec_.constant < 0.0) throw Error(ErrorCode::InvalidArgument, "c0 must be >= 0", "c0");
    if (spec_.slope != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "isotropic correlators carry no slope", "A");
    }
    slope_ = 0.0;
    d_atoms_ = spec_.atoms;
    for (auto& atom : d_atoms_) atom.weight *= 2.0;
  }

  // Spot-check of the admissibility shape on a grid.
  for (int i = 1; i <= 64; ++i) {
    const double r = 0.0625 * i;
    if (D(r) < 0.0 || derivative(1, r) < 0.0 || derivative(2, r) > 0.0 || derivative(3, r) < 0.0) {
      fail(ErrorCode::InvalidArgument, "correlator violates monotonicity/concavity");
    }
  }

  // M - D'(1/M) is increasing in M; bisect for its root.
  double lo = 0.0;
  double hi = std::max(1.0, derivative(1, 0.0));
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid - derivative(1, 1.0 / mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  m_threshold_ = hi;
}

double Correlator::D(double r) const {
  if (r < 0.0) fail(ErrorCode::NegativeArgument, "D requires r >= 0");
  double value = slope_ * r;
  for (const auto& atom : d_atoms_) value += atom.weight * -std::expm1(-atom.rate * atom.rate * r);
  return value;
}

double Correlator::derivative(int order, double r) const {
  if (r < 0.0) fail(ErrorCode::NegativeArgument, "derivative requires r >= 0");
  if (order < 1) return D(r);
  double value = order == 1 ? slope_ : 0.0;
  const double sign = order % 2 == 1 ? 1.0 : -1.0;
  for (const auto& atom : d_atoms_) {
    const double t2 = atom.rate * atom.rate;
    value += sign * atom.weight * std::pow(t2, order) * std::exp(-t2 * r);
  }
  return value;
}

double Correlator::B(double s) const {
  if (spec_.kind != CorrelatorKind::Isotropic) {
    fail(ErrorCode::InvalidArgument, "B is defined for isotropic correlators only");
  }
  double value = spec_.constant;
  for (const auto& atom : spec_.atoms) value += atom.weight * std::exp(-atom.rate * atom.rate * s);
  return value;
}

double Correlator::D_prime_M(double r, double M) const {
  if (r < 0.0) fail(ErrorCode::NegativeArgument, "D'^M requires r >= 0");
  if (!(M > 0.0) || M < m_threshold_ * (1.0 - 1e-12)) {
    fail(ErrorCode::MTooSmall, "M=" + std::to_string(M) + " below threshold " +
                                   std::to_string(m_threshold_));
  }
  return r < 1.0 / M ? M : derivative(1, r);
}

namespace {

void check_overlap(double r, double q) {
  if (!(r > 0.0)) fail(ErrorCode::OutOfRange, "radius r must be positive");
  if (std::abs(q) > r) fail(ErrorCode::OverlapOutOfRange, "overlap must lie in [-r, r]");
}

}  // namespace

double Correlator::G(double r, double q) const {
  check_overlap(r, q);
  return D(r) - 0.5 * D(2.0 * (r - q));
}

double Correlator::G_prime(double r, double q) const {
  check_overlap(r, q);
  return derivative(1, 2.0 * (r - q));
}

double Correlator::theta(double r, double M, double q) const {
  check_overlap(r, q);
  const double s = 2.0 * (r - q);
  return q * D_prime_M(s, M) + 0.5 * D(s);
}

OverlapSeries Correlator::overlap_series(double r, int p_max) const {
  if (p_max < 1) fail(ErrorCode::InvalidArgument, "p_max must be >= 1");
  if (!(r > 0.0)) fail(ErrorCode::OutOfRange, "radius r must be positive");
  OverlapSeries series;
  series.coefficients.resize(p_max + 1);
  series.coefficients[0] = D(r) - 0.5 * D(2.0 * r);
  double partial = series.coefficients[0];
  for (int p = 1; p <= p_max; ++p) {
    // d^p/dq^p of -D(2(r - q))/2 at q = 0, divided by p!; the sign pattern of a
    // completely monotone D' makes every term nonnegative.
    const double sign = p % 2 == 1 ? 1.0 : -1.0;
    const double gamma = std::ldexp(1.0, p - 1) * sign * derivative(p, 2.0 * r) / factorial(p);
    series.coefficients[p] = std::max(gamma, 0.0);
    partial += series.coefficients[p] * std::pow(r, p);
  }
  series.tail_bound = std::max(0.0, G(r, r) - partial);
  return series;
}

double Correlator::convexity_gap(double r, double q, double s) const {
  check_overlap(r, q);
  check_overlap(r, s);
  return G(r, s) - G(r, q) - G_prime(r, q) * (s - q);
}

}  // namespace isofree
