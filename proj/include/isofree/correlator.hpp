#pragma once

#include <vector>

namespace isofree {

enum class CorrelatorKind { LongRange, Isotropic };

// One atom (w, t) of the finite mixing measure in the Yaglom representation.
struct MixtureAtom {
  double weight;
  double rate;
};

struct CorrelatorSpec {
  CorrelatorKind kind = CorrelatorKind::LongRange;
  double slope = 0.0;           // A, long-range only
  double constant = 0.0;        // c0, isotropic only
  std::vector<MixtureAtom> atoms;
};

struct OverlapSeries {
  std::vector<double> coefficients;  // gamma_0 .. gamma_pmax
  double tail_bound;
};

// Validated increment-variance function
//   D(r) = A r + sum_i w_i (1 - exp(-t_i^2 r)).
// Isotropic specs are folded into the same form through D = 2 (B(0) - B(r)).
// Immutable after construction.
class Correlator {
 public:
  // Throws Error on NonpositiveWeight, NonpositiveRate, NegativeSlope,
  // DuplicateRate. Atoms are sorted into increasing rate order.
  explicit Correlator(CorrelatorSpec spec);

  const CorrelatorSpec& spec() const { return spec_; }
  CorrelatorKind kind() const { return spec_.kind; }

  double D(double r) const;
  // p-th derivative of D for p >= 1.
  double derivative(int order, double r) const;
  double D_prime(double r) const { return derivative(1, r); }
  double D_second(double r) const { return derivative(2, r); }

  // Stationary correlation B(s) = c0 + sum w exp(-t^2 s); isotropic only.
  double B(double s) const;

  // Smallest M with D'(1/M) <= M.
  double m_threshold() const { return m_threshold_; }

  // D'(r) for r >= 1/M, M otherwise. Throws MTooSmall below the threshold.
  double D_prime_M(double r, double M) const;

  // G_r(q) = D(r) - D(2(r - q))/2 and its q-derivative D'(2(r - q)).
  double G(double r, double q) const;
  double G_prime(double r, double q) const;

  // theta_r^M(q) = q D'^M(2(r - q)) + D(2(r - q))/2.
  double theta(double r, double M, double q) const;

  OverlapSeries overlap_series(double r, int p_max) const;

  // Bregman gap G_r(s) - G_r(q) - G_r'(q)(s - q) >= 0.
  double convexity_gap(double r, double q, double s) const;

 private:
  CorrelatorSpec spec_;
  // Representation actually evaluated: D = A r + sum a_i (1 - e^{-t_i^2 r}).
  double slope_ = 0.0;
  std::vector<MixtureAtom> d_atoms_;
  double m_threshold_ = 0.0;
};

}  // namespace isofree
