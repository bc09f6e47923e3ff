#include "isofree/crisanti_sommers.hpp"

#include <algorithm>
#include <cmath>

#include "isofree/error.hpp"

namespace isofree {

void validate_cs(const CSInstance& inst) {
  if (!(inst.beta >= 0.0) || !std::isfinite(inst.beta)) fail(ErrorCode::InvalidArgument, "beta must be >= 0");
  if (!(inst.h2 >= 0.0) || !std::isfinite(inst.h2)) fail(ErrorCode::InvalidArgument, "h2 must be >= 0");
  if (!std::isfinite(inst.h1)) fail(ErrorCode::InvalidArgument, "h1 must be finite");
  if (!(inst.L > 0.0) || !std::isfinite(inst.L)) fail(ErrorCode::InvalidArgument, "L must be positive");
}

double eval_cs(const CSInstance& inst, double r, const DiscreteOrderParameter& op) {
  if (std::abs(op.r() - r) > 1e-14 * std::max(1.0, r)) {
    fail(ErrorCode::InvalidArgument, "order parameter radius differs from r");
  }
  const std::size_t n = op.levels();
  const double q_max = n == 0 ? 0.0 : op.q().back();
  if (!(q_max < r)) fail(ErrorCode::QmaxAtBoundary, "q_max must be below r");
  const Correlator& c = inst.correlator;

  // L(q) = int_q^r x, evaluated at the breakpoints from the top down.
  double upper = r - q_max;
  if (!(upper > 0.0)) fail(ErrorCode::NonpositiveLogArgument, "r - q_max must be positive");
  double log_term = std::log(upper);
  double inverse_integral = 0.0;
  double field_integral = 0.0;
  for (std::size_t j = n; j >= 1; --j) {
    const double a = j == 1 ? 0.0 : op.q()[j - 2];
    const double b = op.q()[j - 1];
    const double x = op.x()[j - 1];
    const double lower = upper + x * (b - a);
    if (!(lower > 0.0) || !(upper > 0.0)) fail(ErrorCode::NonpositiveLogArgument, "non-positive log argument");
    inverse_integral += std::log1p(x * (b - a) / upper) / x;
    field_integral += x * 0.5 * (c.D(2.0 * (r - a)) - c.D(2.0 * (r - b)));
    upper = lower;
  }
  const double x_integral = upper;  // L(0)
  const double entropic = 0.5 * (log_term + inverse_integral + inst.h1 * inst.h1 * x_integral - inst.h2 * r);
  const double energetic = 0.5 * inst.beta * inst.beta * (c.D_prime(2.0 * (r - q_max)) + field_integral);
  const double value = entropic + energetic;
  if (!std::isfinite(value)) fail(ErrorCode::NonfiniteValue, "non-finite Crisanti-Sommers value");
  return value;
}

SaddleResult optimize_cs(const CSInstance& inst, std::size_t n, const OptimizerOptions& opts) {
  validate_cs(inst);
  const double d = inst.d();
  OptimizerOptions nested = opts;
  nested.nested_x = true;
  auto inner = [&](double r) {
    return minimize_order_parameter(
        [&](const DiscreteOrderParameter& op) { return eval_cs(inst, r, op); }, r, n, nested);
  };
  OptimizerOptions outer = opts;
  outer.r_tol = std::min(opts.r_tol, 1e-8 * d);
  SaddleResult out = maximize_over_r(inner, 1e-9 * d, d, {d, 0.5 * d}, outer);
  out.plateau_dev = 0.0;
  return out;
}

}  // namespace isofree
