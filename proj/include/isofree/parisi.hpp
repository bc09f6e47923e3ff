#pragma once

#include <vector>

#include "isofree/correlator.hpp"
#include "isofree/model.hpp"
#include "isofree/numerics.hpp"

namespace isofree {

struct EvalConfig {
  std::vector<double> M_grid{1e3, 3e3, 1e4};
  // Half-width of the y-grid in units of the standard deviation accumulated
  // below the top level (floored at one).
  double y_halfwidth = 10.0;
  int y_points = 257;
  int quad_nodes = 48;
  double lambda_lo = -5.0;
  double lambda_hi = 5.0;
  double tol_lambda = 1e-6;
  double tol_value = 1e-6;
  // Finite-difference cross-check solver.
  double fd_dy = 0.05;
  double fd_cfl = 0.4;
  int fd_q_steps = 200;
};

// Throws InvalidArgument / MTooSmall on inadmissible settings.
void validate_eval_config(const EvalConfig& cfg, const Correlator& c);

// Delta_k = m_k - m_{k-1}, k = 1..n+1, with m_k = D'^M(2(r - q_k)), m_0 = 0,
// m_{n+1} = M.
std::vector<double> level_variances(const Correlator& c, const DiscreteOrderParameter& op, double M);

struct RecursionResult {
  double f00;
  double lambda;
  double M;
  // Extrapolation error estimate for Gaussian mass outside the y-grid.
  double tail_estimate;
  // f_1 .. f_n on the y-grid when requested (empty otherwise).
  std::vector<numerics::UniformSpline> profiles;
};

RecursionResult solve_recursion(const Correlator& c, const DiscreteOrderParameter& op, double M,
                                double beta, double lambda, const StateSpace& space,
                                const EvalConfig& cfg, bool keep_profiles = false);

// Independent solver of the terminal value problem by Crank-Nicolson
// diffusion with an explicit (Heun) nonlinear term, stepping backward in q.
double solve_pde_fd(const Correlator& c, const DiscreteOrderParameter& op, double M, double beta,
                    double lambda, const StateSpace& space, const EvalConfig& cfg);

struct LambdaInfimum {
  double lambda_star;
  double value;
  int evaluations;
};

// inf over lambda of f00(lambda) - lambda r. Throws InfimumDiverges.
LambdaInfimum lambda_infimum(const Correlator& c, const DiscreteOrderParameter& op, double M,
                             double beta, const StateSpace& space, const EvalConfig& cfg);

// f00(lambda) - lambda r at a fixed lambda.
double fixed_lambda_value(const Correlator& c, const DiscreteOrderParameter& op, double M,
                          double beta, double lambda, const StateSpace& space, const EvalConfig& cfg);

struct ParisiAtM {
  double M;
  double value;
  double lambda_star;
};

// Regularized functional at one M: lambda infimum minus (beta^2/2) theta sum.
ParisiAtM parisi_at_M(const Correlator& c, const DiscreteOrderParameter& op, double M, double beta,
                      const StateSpace& space, const EvalConfig& cfg);

struct LocalParisiResult {
  double value;  // at the largest M
  double lambda_star;
  double plateau_dev;
  std::vector<ParisiAtM> per_M;
};

// Evaluates every M in the grid; throws PlateauNotReached when the values in
// the upper half of the grid spread more than 10 * tol_value.
LocalParisiResult local_parisi(const Correlator& c, const DiscreteOrderParameter& op, double beta,
                               const StateSpace& space, const EvalConfig& cfg,
                               bool require_plateau = true);

}  // namespace isofree
