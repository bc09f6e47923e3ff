#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "isofree/model.hpp"
#include "isofree/parisi.hpp"

namespace isofree {

struct OptimizerOptions {
  int starts = 5;  // at least 5: one equispaced start, the rest random
  std::uint64_t seed = 0;
  int max_evaluations = 800;  // per start
  double tol = 1e-9;          // required improvement over the n-1 value
  // Golden-section tolerance of the outer search over r.
  double r_tol = 1e-4;
  // Minimize over x at every trial q (for objectives convex in x).
  bool nested_x = false;
};

struct TraceEntry {
  double r;
  std::size_t n;
  int start;  // -1 for the lower-level embedding candidate
  double value;
  int evaluations;
};

struct InnerResult {
  DiscreteOrderParameter op;
  double value;
  bool no_descent;  // the n-1 optimum was returned
  double spread;    // max - min over converged starts
  std::vector<TraceEntry> trace;
  std::vector<double> level_values;  // best value found with 0..n levels
};

using OrderObjective = std::function<double(const DiscreteOrderParameter&)>;

// Minimizes f over validated order parameters with n levels at fixed r by
// multi-start Nelder-Mead in softmax gap coordinates. Lower level counts are
// solved first; when no start beats the n-1 value by opts.tol, that optimum
// is returned with no_descent set. Evaluation errors count as +inf; if every
// evaluation fails the first error is rethrown.
InnerResult minimize_order_parameter(const OrderObjective& f, double r, std::size_t n,
                                     const OptimizerOptions& opts);

// inf over (q, x) at fixed r of the regularized Parisi functional at the
// largest M of cfg.M_grid.
InnerResult optimize_x(const Correlator& c, double r, double beta, const StateSpace& space,
                       std::size_t n, const EvalConfig& cfg, const OptimizerOptions& opts);

struct SaddleResult {
  double r_star;
  DiscreteOrderParameter op_star;
  double value;
  std::size_t n;  // level count of op_star
  bool no_descent;
  double spread;
  double plateau_dev;  // M-grid spread at the optimum (NaN when not computed)
  std::vector<TraceEntry> trace;
  std::vector<double> level_values;
};

// Maximizes over r a strictly nested inner minimization. inner(r) returns the
// inner optimum or throws when r is infeasible. The feasible interval inside
// [lo, hi] is bracketed by bisection from a feasible probe.
SaddleResult maximize_over_r(const std::function<InnerResult(double)>& inner, double lo, double hi,
                             std::vector<double> probes, const OptimizerOptions& opts);

// sup over r in [0, d] of optimize_x. Throws AllRInfeasible.
SaddleResult optimize_saddle(const Correlator& c, double beta, const StateSpace& space, std::size_t n,
                             const EvalConfig& cfg, const OptimizerOptions& opts);

}  // namespace isofree
