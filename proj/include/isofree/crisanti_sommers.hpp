#pragma once

#include <cstddef>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "isofree/saddle.hpp"

namespace isofree {

// Rotationally invariant ball of radius L sqrt(N) with field h1 and
// confinement h2.
struct CSInstance {
  Correlator correlator;
  double beta;
  double h1;
  double h2;
  double L;

  double d() const { return L * L; }
};

// Throws InvalidArgument unless beta >= 0, h2 >= 0, L > 0.
void validate_cs(const CSInstance& inst);

// Closed-form functional for x = x_k on [q_{k-1}, q_k) (q_0 = 0) and x = 1 on
// [q_n, r], so that q_max = q_n. Throws QmaxAtBoundary, NonpositiveLogArgument.
double eval_cs(const CSInstance& inst, double r, const DiscreteOrderParameter& op);

// max over r in (0, d] of min over order parameters of eval_cs.
SaddleResult optimize_cs(const CSInstance& inst, std::size_t n, const OptimizerOptions& opts);

}  // namespace isofree
