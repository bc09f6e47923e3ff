#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace isofree::numerics {

// Nodes and weights for E[f(Z)], Z ~ N(0, 1) (probabilists' Gauss-Hermite).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;
};

// Cached per node count; safe to call concurrently.
const GaussHermite& gauss_hermite(int count);

double normal_pdf(double z);
// log P(Z > a) and log P(Z < b), accurate deep into either tail.
double log_normal_sf(double a);
double log_normal_cdf(double b);
double normal_sf(double a);
double normal_cdf(double b);

// log(exp(a) + exp(b)) without overflow; -inf is the neutral element.
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double log_sum_exp(std::span<const double> values);

// Natural cubic spline on a uniform grid with affine continuation outside
// [lo, hi] using the end values and end slopes.
class UniformSpline {
 public:
  UniformSpline() = default;
  UniformSpline(double lo, double step, std::vector<double> values);

  double operator()(double y) const;
  double derivative(double y) const;
  double lo() const { return lo_; }
  double hi() const { return lo_ + step_ * static_cast<double>(values_.size() - 1); }
  double step() const { return step_; }
  const std::vector<double>& values() const { return values_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }

 private:
  double lo_ = 0.0;
  double step_ = 1.0;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivatives at knots
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
};

// Golden-section minimization of a unimodal function on [lo, hi].
struct ScalarMinimum {
  double arg;
  double value;
  int evaluations;
};
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tol);

struct NelderMeadOptions {
  double initial_step = 0.5;
  double f_tol = 1e-10;
  double x_tol = 1e-9;
  int max_evaluations = 2000;
};

struct NelderMeadResult {
  std::vector<double> arg;
  double value;
  int evaluations;
};

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, const NelderMeadOptions& options);

}  // namespace isofree::numerics
